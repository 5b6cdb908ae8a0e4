//! Modularity of a weighted partition and NMI between two labelings.

use congestion::graph::WeightedGraph;
use congestion::metrics::{modularity, nmi, sim_jaccard, sim_maxratio, sim_overlap, LabeledPartition};

fn main() -> congestion::Result<()> {
    let triangles = WeightedGraph::from_edges(6, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)])?;
    println!("two triangles split apart: Q={:?}", modularity(&triangles, &[0, 0, 0, 1, 1, 1]));
    println!("two triangles lumped:      Q={:?}", modularity(&triangles, &[0; 6]));
    println!("mixed halves:              Q={:?}", modularity(&triangles, &[0, 1, 0, 1, 0, 1]));

    let truth = LabeledPartition::new([(0, 'a'), (1, 'a'), (2, 'a'), (3, 'b'), (4, 'b'), (5, 'b')], 0);
    let renamed = LabeledPartition::new([(0, 7), (1, 7), (2, 7), (3, 2), (4, 2), (5, 2)], 0);
    let off_by_one = LabeledPartition::new([(0, 0), (1, 0), (2, 1), (3, 1), (4, 1), (5, 1)], 0);
    println!("NMI renamed labels: {:.3}", nmi(&truth, &renamed)?);
    println!("NMI one node moved: {:.3}", nmi(&truth, &off_by_one)?);

    let a = [1, 2, 3, 4].into_iter().collect();
    let b = [3, 4, 5].into_iter().collect();
    println!(
        "sets {{1,2,3,4}} vs {{3,4,5}}: jaccard {:.3} maxratio {:.3} overlap {:.3}",
        sim_jaccard(&a, &b),
        sim_maxratio(&a, &b, 0.0),
        sim_overlap(&a, &b)
    );
    Ok(())
}
