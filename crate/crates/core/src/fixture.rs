//! Bundled NSFNet example instance.
//!
//! The standard 14-node, 21-link NSFNet backbone with datacenters at nodes
//! 1, 3, 5, 8, 10, and 13, a 3-hop latency limit, k = 2 island coverage,
//! and one EMP-style disaster zone frying a contiguous four-node region.
//! The zone geometry is a frozen reconstruction: the region and its listed
//! link damage are fixed here so downstream numbers are reproducible.

use crate::format::parse_instance;
use crate::model::Instance;

pub const NSFNET_DOCUMENT: &str = include_str!("../data/nsfnet.toml");

pub fn nsfnet() -> Instance {
    parse_instance(NSFNET_DOCUMENT).expect("bundled fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::NodeId;

    #[test]
    fn fixture_shape() {
        let inst = nsfnet();
        assert_eq!(inst.net().node_count(), 14);
        assert_eq!(inst.net().links().len(), 21);
        let dcs: Vec<u32> = inst.net().datacenters().iter().map(|n| n.0).collect();
        assert_eq!(dcs, vec![1, 3, 5, 8, 10, 13]);
        assert_eq!(inst.params().k, 2);
        assert_eq!(inst.params().q, 2);
        assert_eq!(inst.params().b, 5);
        assert_eq!(inst.params().latency_hops, 3);
        assert_eq!(inst.params().catalog_k, 4);
        assert_eq!(inst.metadata()["link_capacity"], "32 Gbps");
    }

    #[test]
    fn zone_normalization() {
        let inst = nsfnet();
        let zone = inst.disasters().zone("emp").unwrap();
        assert_eq!(zone.failed_nodes().len(), 4);
        assert_eq!(zone.listed_links().len(), 7);
        // One more incident link fails implicitly: 11-14.
        assert_eq!(zone.failed_links().len(), 8);
    }

    /// Necessary condition for any feasible design, and for placements
    /// that avoid the zone entirely: three controller sites outside the
    /// failed region can give every switch two in-island controllers.
    #[test]
    fn three_outside_zone_controllers_can_cover() {
        let inst = nsfnet();
        let zone = inst.disasters().zone("emp").unwrap();
        let outside: Vec<NodeId> = inst
            .net()
            .datacenters()
            .iter()
            .copied()
            .filter(|f| !zone.node_failed(*f))
            .collect();
        assert_eq!(outside.len(), 5);
        let covers = |subset: &[NodeId]| {
            inst.net().nodes().all(|i| {
                subset
                    .iter()
                    .filter(|&&f| inst.catalog().within_latency(i, f))
                    .count()
                    >= 2
            })
        };
        let mut found = Vec::new();
        for (ai, &a) in outside.iter().enumerate() {
            for (bi, &b) in outside.iter().enumerate().skip(ai + 1) {
                for &c in outside.iter().skip(bi + 1) {
                    if covers(&[a, b, c]) {
                        found.push([a.0, b.0, c.0]);
                    }
                }
            }
        }
        assert!(!found.is_empty(), "no 3-site cover outside the zone");
    }
}
