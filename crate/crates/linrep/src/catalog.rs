//! Built-in benchmark instances.

use crate::constraints::{AccessStructure, NetworkInstance};
use crate::polymatroid::RankVector;

type Relation = (Vec<usize>, Vec<usize>);

fn net(k: usize, n: usize, rels: &[(&[usize], &[usize])]) -> NetworkInstance {
    let relations: Vec<Relation> = rels.iter().map(|(a, b)| (a.to_vec(), b.to_vec())).collect();
    NetworkInstance::new(k, n, relations).expect("catalog instance is well formed")
}

/// The Fano network: solvable exactly in characteristic 2.
pub fn fano() -> NetworkInstance {
    net(
        3,
        7,
        &[
            (&[1, 2], &[1, 2, 4]),
            (&[2, 3], &[2, 3, 5]),
            (&[4, 5], &[4, 5, 6]),
            (&[3, 4], &[3, 4, 7]),
            (&[1, 6], &[1, 3, 6]),
            (&[6, 7], &[2, 6, 7]),
            (&[5, 7], &[1, 5, 7]),
        ],
    )
}

/// The non-Fano network: solvable exactly in odd characteristic.
pub fn non_fano() -> NetworkInstance {
    net(
        3,
        7,
        &[
            (&[1, 2, 3], &[1, 2, 3, 4]),
            (&[1, 2], &[1, 2, 5]),
            (&[1, 3], &[1, 3, 6]),
            (&[2, 3], &[2, 3, 7]),
            (&[4, 5], &[3, 4, 5]),
            (&[4, 6], &[2, 4, 6]),
            (&[4, 7], &[1, 4, 7]),
            (&[5, 6, 7], &[1, 2, 3, 5, 6, 7]),
        ],
    )
}

/// The Vámos network, not linearly solvable over any field.
pub fn vamos() -> NetworkInstance {
    net(
        4,
        8,
        &[
            (&[1, 2, 3, 4], &[1, 2, 3, 4, 5]),
            (&[1, 2, 5], &[1, 2, 5, 6]),
            (&[2, 3, 6], &[2, 3, 6, 7]),
            (&[3, 4, 7], &[3, 4, 7, 8]),
            (&[4, 8], &[2, 4, 8]),
            (&[2, 3, 4, 8], &[1, 2, 3, 4, 8]),
            (&[1, 4, 5, 8], &[1, 2, 3, 4, 5, 8]),
            (&[1, 2, 3, 7], &[1, 2, 3, 4, 7]),
            (&[1, 5, 7], &[1, 3, 5, 7]),
        ],
    )
}

/// The network whose scalar solutions are representations of U(2,4).
pub fn u24() -> NetworkInstance {
    net(
        2,
        4,
        &[
            (&[1, 2], &[1, 2, 3]),
            (&[1, 3], &[1, 2, 3]),
            (&[2, 3], &[1, 2, 3]),
            (&[1, 2], &[1, 2, 4]),
            (&[1, 4], &[1, 2, 4]),
            (&[3, 4], &[1, 3, 4]),
            (&[3, 4], &[2, 3, 4]),
            (&[2, 4], &[1, 2, 4]),
        ],
    )
}

/// Three sources, three hyperedges.
pub fn hn1() -> NetworkInstance {
    net(
        3,
        6,
        &[
            (&[1, 2, 3], &[1, 2, 3, 4]),
            (&[1, 3, 4], &[1, 3, 4, 5]),
            (&[3, 4, 5], &[3, 4, 5, 6]),
            (&[4, 5], &[1, 3, 4, 5]),
            (&[4, 6], &[2, 3, 4, 6]),
            (&[5, 6], &[2, 3, 5, 6]),
        ],
    )
}

/// A multilevel diversity coding system with three sources and four encoders.
pub fn mdcs() -> NetworkInstance {
    net(
        3,
        7,
        &[
            (&[1, 2, 3], &[1, 2, 3, 4]),
            (&[1, 2, 3], &[1, 2, 3, 5]),
            (&[1, 2, 3], &[1, 2, 3, 6]),
            (&[1, 2, 3], &[1, 2, 3, 7]),
            (&[4], &[1, 4]),
            (&[5], &[1, 5]),
            (&[4, 5], &[1, 2, 4, 5]),
            (&[6, 7], &[1, 2, 6, 7]),
            (&[4, 6], &[1, 2, 3, 4, 6]),
            (&[5, 7], &[1, 2, 3, 5, 7]),
        ],
    )
}

/// A two-source butterfly-like network on five variables used for the
/// transformation example; its symmetry group is generated by (3 4).
pub fn butterfly5() -> NetworkInstance {
    net(
        2,
        5,
        &[
            (&[1, 2], &[1, 2, 3]),
            (&[1, 2], &[1, 2, 4]),
            (&[3, 4], &[3, 4, 5]),
            (&[3, 5], &[1, 3, 5]),
            (&[4, 5], &[1, 4, 5]),
            (&[3, 4], &[2, 3, 4]),
        ],
    )
}

/// The Benaloh–Leichter access structure: the secret is element 1 and
/// parties 2..5 are authorized in consecutive pairs.
pub fn benaloh() -> AccessStructure {
    AccessStructure::new(5, vec![vec![2, 3], vec![3, 4], vec![4, 5]]).expect("catalog instance is well formed")
}

/// Benaloh–Leichter secret and share sizes with a known linear scheme.
pub const BENALOH_SIZES: [u32; 5] = [2, 2, 3, 3, 2];

/// A rank-6 integer polymatroid on six elements.
pub fn linrank6() -> RankVector {
    RankVector::new(vec![
        1, 1, 2, 1, 2, 2, 2, 2, 3, 3, 4, 3, 4, 4, 4, 2, 3, 3, 4, 3, 4, 4, 4, 4, 5, 5, 6, 5, 6, 6, 6, 4, 5, 5, 6, 5, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6,
    ])
    .expect("63 entries")
}

/// The uniform matroid U(2,4).
pub fn u24_rank_vector() -> RankVector {
    RankVector::new((1u32..16).map(|m| m.count_ones().min(2)).collect()).expect("15 entries")
}

/// Catalog networks by name.
pub fn network(name: &str) -> Option<NetworkInstance> {
    Some(match name.to_ascii_lowercase().as_str() {
        "fano" => fano(),
        "nonfano" | "non-fano" => non_fano(),
        "vamos" => vamos(),
        "u24" | "2u24" => u24(),
        "hn1" => hn1(),
        "mdcs" => mdcs(),
        "butterfly5" => butterfly5(),
        _ => return None,
    })
}

pub const NETWORK_NAMES: [&str; 7] = ["fano", "nonfano", "vamos", "u24", "hn1", "mdcs", "butterfly5"];
