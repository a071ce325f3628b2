mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use verblex::eval::{prf, spearman};
use verblex::mapping::{Hybrid, HybridNode};

/// Rank by counting: 1 + #smaller + (#equal - 1) / 2.
pub fn counted_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|x| {
            let less = xs.iter().filter(|y| *y < x).count() as f64;
            let equal = xs.iter().filter(|y| *y == x).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn oracle_rho(xs: &[f64], ys: &[f64]) -> f64 {
    let (rx, ry) = (counted_ranks(xs), counted_ranks(ys));
    let n = xs.len() as f64;
    let cov = rx.iter().zip(&ry).map(|(a, b)| a * b).sum::<f64>() / n
        - (rx.iter().sum::<f64>() / n) * (ry.iter().sum::<f64>() / n);
    let var = |r: &[f64]| r.iter().map(|a| a * a).sum::<f64>() / n - (r.iter().sum::<f64>() / n).powi(2);
    cov / (var(&rx) * var(&ry)).sqrt()
}

fn nodes(h: &Hybrid, r: &verblex::model::Resource, c: &verblex::corpus::Corpus) -> Vec<HybridNode> {
    let mut out: Vec<HybridNode> = r.ontology.keys().cloned().map(HybridNode::Type).collect();
    for s in c.iter() {
        if h.resolve_mapping(&s.id).unwrap().is_some() {
            out.push(HybridNode::Synset(s.id.clone()));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wup_is_symmetric_reflexive_and_bounded(seed in any::<u64>(), picks in prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 40)) {
        let (r, c) = common::random_hierarchy(seed, 60, 90);
        let h = Hybrid::new(&r, &c);
        let all = nodes(&h, &r, &c);
        for (i, j) in picks {
            let (a, b) = (i.get(&all), j.get(&all));
            let ab = h.wup(a, b).unwrap();
            prop_assert_eq!(ab, h.wup(b, a).unwrap());
            prop_assert!(ab > 0.0 && ab <= 1.0);
            prop_assert_eq!(h.wup(a, a).unwrap(), 1.0);
            let lcs = h.lcs(a, b).unwrap();
            let expect = 2.0 * h.hybrid_depth(&lcs).unwrap() as f64
                / (h.hybrid_depth(a).unwrap() + h.hybrid_depth(b).unwrap()) as f64;
            prop_assert_eq!(ab, expect);
        }
    }

    #[test]
    fn synsets_sit_below_their_mapped_type(seed in any::<u64>()) {
        let (r, c) = common::random_hierarchy(seed, 40, 60);
        let h = Hybrid::new(&r, &c);
        for s in c.iter() {
            if let Some(m) = h.resolve_mapping(&s.id).unwrap() {
                let ds = h.hybrid_depth(&HybridNode::Synset(s.id.clone())).unwrap();
                let dt = h.hybrid_depth(&HybridNode::Type(m.ty.clone())).unwrap();
                prop_assert_eq!(ds, dt + 1 + m.hops);
                let anc = h.ancestors(&HybridNode::Synset(s.id.clone())).unwrap();
                prop_assert!(anc.contains(&HybridNode::Type(m.ty)));
            }
        }
    }

    #[test]
    fn spearman_matches_counted_ranks(xs in prop::collection::vec(0u8..6, 3..12), ys in prop::collection::vec(0u8..6, 3..12)) {
        let n = xs.len().min(ys.len());
        let xs: Vec<f64> = xs[..n].iter().map(|&v| v as f64).collect();
        let ys: Vec<f64> = ys[..n].iter().map(|&v| v as f64).collect();
        match spearman(&xs, &ys) {
            Ok(rho) => {
                prop_assert!((rho - oracle_rho(&xs, &ys)).abs() < 1e-9);
                prop_assert!((rho - spearman(&ys, &xs).unwrap()).abs() < 1e-12);
                let cubed: Vec<f64> = xs.iter().map(|v| v * v * v + 1.0).collect();
                prop_assert!((rho - spearman(&cubed, &ys).unwrap()).abs() < 1e-12);
                let flipped: Vec<f64> = xs.iter().map(|v| -v).collect();
                prop_assert!((rho + spearman(&flipped, &ys).unwrap()).abs() < 1e-12);
            }
            Err(_) => {
                let constant = |v: &[f64]| v.iter().all(|x| *x == v[0]);
                prop_assert!(constant(&xs) || constant(&ys));
            }
        }
    }

    #[test]
    fn prf_is_bounded(p in prop::collection::btree_set(0u8..10, 0..8), g in prop::collection::btree_set(0u8..10, 1..8)) {
        let m = prf(&p, &g);
        prop_assert!((0.0..=1.0).contains(&m.precision) && (0.0..=1.0).contains(&m.recall));
        prop_assert_eq!(m.f1 == 0.0, m.precision * m.recall == 0.0);
        prop_assert!(m.f1 <= m.precision.max(m.recall) + 1e-12);
        prop_assert!(m.f1 >= m.precision.min(m.recall) - 1e-12);
        if p == g {
            prop_assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        }
        let sub: BTreeSet<u8> = p.intersection(&g).copied().collect();
        if !sub.is_empty() {
            prop_assert_eq!(prf(&sub, &g).precision, 1.0);
        }
    }
}
