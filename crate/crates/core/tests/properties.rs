use nalgebra::DVector;
use proptest::prelude::*;

use hgw::centrality::{centrality_report, information_centrality, mdt_closed_form};
use hgw::generators::{random_connected, to_edge_list};
use hgw::localization::{heat_bound, zeta, zeta_dt};
use hgw::metric::{intrinsic_metric, verify_intrinsic, MetricVariant};
use hgw::spectral::heat_kernel;
use hgw::wavelet::{WaveletFrame, DEFAULT_SCALE_COUNT};
use hgw::{Graph, SpectralDecomposition};

fn graph() -> impl Strategy<Value = Graph> {
    (2usize..14, 0.0f64..0.8, any::<u64>()).prop_map(|(n, extra, seed)| random_connected(n, extra, 0.1, 2.0, seed))
}

fn graph_and_perm() -> impl Strategy<Value = (Graph, Vec<usize>)> {
    graph().prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_rows_sum_to_zero_and_spectrum_is_nonnegative(g in graph()) {
        let l = g.laplacian();
        for i in 0..g.n() {
            prop_assert!(l.row(i).sum().abs() <= 1e-12 * l[(i, i)].max(1.0));
        }
        let d = SpectralDecomposition::from_graph(&g).unwrap();
        prop_assert!(d.eigenvalues()[0] >= -1e-12 * d.lambda_max().max(1.0));
        prop_assert!(d.connected());
    }

    #[test]
    fn degree_normalized_metric_is_intrinsic_and_a_metric(g in graph()) {
        let m = intrinsic_metric(&g, MetricVariant::DegreeNormalized).unwrap();
        prop_assert!(verify_intrinsic(&m).passed);
        let n = g.n();
        for x in 0..n {
            prop_assert_eq!(m.dist[(x, x)], 0.0);
            for y in 0..n {
                prop_assert_eq!(m.dist[(x, y)], m.dist[(y, x)]);
                for z in 0..n {
                    prop_assert!(m.dist[(x, z)] <= m.dist[(x, y)] + m.dist[(y, z)] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn heat_kernel_is_symmetric_nonnegative_and_stochastic(g in graph(), t in 1e-3f64..50.0) {
        let d = SpectralDecomposition::from_graph(&g).unwrap();
        let h = heat_kernel(&d, t).unwrap();
        prop_assert!((&h - h.transpose()).amax() <= 1e-12);
        prop_assert!(h.min() >= -1e-12);
        for i in 0..g.n() {
            prop_assert!((h.row(i).sum() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn centrality_is_equivariant_under_relabeling((g, perm) in graph_and_perm()) {
        let d = SpectralDecomposition::from_graph(&g).unwrap();
        let pg = g.permuted(&perm).unwrap();
        let pd = SpectralDecomposition::from_graph(&pg).unwrap();
        let (mdt, ic) = (mdt_closed_form(&d).unwrap(), information_centrality(&d).unwrap());
        let (pmdt, pic) = (mdt_closed_form(&pd).unwrap(), information_centrality(&pd).unwrap());
        for (k, &old) in perm.iter().enumerate() {
            prop_assert!((pmdt[k] - mdt[old]).abs() <= 1e-10 * mdt[old]);
            prop_assert!((pic[k] - ic[old]).abs() <= 1e-10 * ic[old]);
        }
        let a = centrality_report(&g, &d).unwrap();
        let b = centrality_report(&pg, &pd).unwrap();
        prop_assert_eq!(a.tie_set, b.tie_set);
        prop_assert_eq!(a.leader, b.leader);
    }

    #[test]
    fn weight_scaling_rescales_centrality(g in graph(), alpha in 0.05f64..20.0) {
        let d = SpectralDecomposition::from_graph(&g).unwrap();
        let sg = g.scaled(alpha).unwrap();
        let sd = SpectralDecomposition::from_graph(&sg).unwrap();
        let (mdt, smdt) = (mdt_closed_form(&d).unwrap(), mdt_closed_form(&sd).unwrap());
        let (ic, sic) = (information_centrality(&d).unwrap(), information_centrality(&sd).unwrap());
        for x in 0..g.n() {
            prop_assert!((smdt[x] * alpha - mdt[x]).abs() <= 1e-9 * mdt[x]);
            prop_assert!((sic[x] / alpha - ic[x]).abs() <= 1e-9 * ic[x]);
        }
    }

    #[test]
    fn frame_bounds_sandwich_zero_mean_signals(
        g in graph(),
        raw in prop::collection::vec(-1.0f64..1.0, 14),
    ) {
        let d = SpectralDecomposition::from_graph(&g).unwrap();
        let frame = WaveletFrame::with_default_scales(&d, DEFAULT_SCALE_COUNT).unwrap();
        let mut f = DVector::from_column_slice(&raw[..g.n()]);
        let mean = f.mean();
        f.add_scalar_mut(-mean);
        let norm2 = f.norm_squared();
        let energy = frame.transform(&f).unwrap().norm_squared();
        prop_assert!(energy >= frame.frame_a * norm2 * (1.0 - 1e-10) - 1e-300);
        prop_assert!(energy <= frame.frame_b * norm2 * (1.0 + 1e-10));
        let back = frame.reconstruct(&frame.transform(&f).unwrap()).unwrap();
        prop_assert!((back - &f).amax() <= 1e-8 * f.amax().max(1e-12));
    }

    #[test]
    fn edge_list_round_trip_preserves_weights(g in graph()) {
        let back = Graph::parse_edge_list(&to_edge_list(&g)).unwrap();
        prop_assert_eq!(back.n(), g.n());
        for i in 0..g.n() {
            for j in 0..g.n() {
                let (bi, bj) = (back.index_of(g.label(i)).unwrap(), back.index_of(g.label(j)).unwrap());
                prop_assert_eq!(back.weight(bi, bj), g.weight(i, j));
            }
        }
    }

    #[test]
    fn zeta_is_nonnegative_monotone_in_r_and_decreasing_in_t(
        s in 1e-3f64..10.0,
        t in 1e-3f64..100.0,
        r in 0.0f64..10.0,
        dr in 0.0f64..5.0,
    ) {
        let z = zeta(s, t, r).unwrap();
        prop_assert!(z >= 0.0);
        prop_assert!(zeta(s, t, r + dr).unwrap() >= z);
        prop_assert!(zeta_dt(s, t, r).unwrap() <= 0.0);
        let b = heat_bound(s, t, r).unwrap();
        prop_assert!(b > 0.0 || z > 700.0);
        prop_assert!(b <= 1.0);
    }
}
