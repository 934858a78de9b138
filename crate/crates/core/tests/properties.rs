use std::collections::HashSet;

use proptest::collection::vec;
use proptest::prelude::*;
use sandpile_core::analysis::{path_lengths, topological_order};
use sandpile_core::fastfix::{
    compute_interval, cut, general_iteration_bound, merge_pass, run_fast_spm_with, MergePolicy,
};
use sandpile_core::{
    applicable_moves, apply_move, build_orbit_graph, closed_form_fixpoint, f_n, is_lattice,
    is_reachable, phi, restrict_length, run_fast_general, run_fast_spm, run_to_fixpoint_naive,
    step_parallel, Configuration, Mode, Model,
};

const LIMIT: u64 = 10_000_000;

fn naive_seq(c: &Configuration) -> (Configuration, u64) {
    run_to_fixpoint_naive(c, &Model::SPM, Mode::Sequential, LIMIT).unwrap()
}

fn config(max_len: usize, max_height: u64) -> impl Strategy<Value = Configuration> {
    vec(0..=max_height, 0..=max_len).prop_map(Configuration::new)
}

/// Every sequence of length `len` with entries in `0..=max`.
fn all_configs(len: usize, max: u64) -> Vec<Configuration> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u64>| {
                (0..=max).map(move |h| {
                    let mut v = prefix.clone();
                    v.push(h);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(Configuration::new).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn fast_algorithms_match_the_simulator(c in config(50, 20)) {
        let (fp, steps) = naive_seq(&c);
        let general = run_fast_general(&c).unwrap();
        let merge = run_fast_spm(&c).unwrap();
        prop_assert_eq!(&general.fixpoint, &fp);
        prop_assert_eq!(&merge.fixpoint, &fp);
        prop_assert_eq!(merge.transient, Some(steps));
        prop_assert!(general.iterations <= general_iteration_bound(c.canonical_len(), c.grains()));
        prop_assert!(merge.merges <= c.grains());
    }

    #[test]
    fn sparse_configurations_match_the_simulator(c in config(60, 3)) {
        let (fp, steps) = naive_seq(&c);
        let merge = run_fast_spm(&c).unwrap();
        prop_assert_eq!(&merge.fixpoint, &fp);
        prop_assert_eq!(merge.transient, Some(steps));
        prop_assert_eq!(run_fast_general(&c).unwrap().fixpoint, fp);
    }

    #[test]
    fn two_distant_piles(m in 0u64..200, n in 0u64..200, gap in 0usize..40) {
        let mut h = vec![m];
        h.extend(std::iter::repeat_n(0, gap));
        h.push(n);
        let c = Configuration::new(h);
        let (fp, steps) = naive_seq(&c);
        prop_assert_eq!(&run_fast_general(&c).unwrap().fixpoint, &fp);
        let merge = run_fast_spm(&c).unwrap();
        prop_assert_eq!(merge.fixpoint, fp);
        prop_assert_eq!(merge.transient, Some(steps));
    }

    #[test]
    fn cut_windows_are_reachable_and_conserve_grains(c in config(60, 20)) {
        let h = c.heights();
        let ivs = cut(h);
        prop_assert_eq!(ivs.iter().map(|iv| iv.n).sum::<u64>(), c.grains());
        prop_assert_eq!(ivs.iter().map(|iv| iv.l).sum::<usize>(), h.len());
        for iv in &ivs {
            let window = Configuration::from(&h[iv.start..iv.end()]);
            prop_assert!(is_reachable(&window), "window {} not reachable", window);
            prop_assert_eq!(window.grains(), iv.n);
        }
        let mut computed: Vec<_> = ivs.iter().map(compute_interval).collect();
        for iv in &computed {
            prop_assert!(iv.k >= 0 && (iv.k as usize) < iv.l.max(1));
        }
        loop {
            let (next, merged) = merge_pass(computed);
            prop_assert_eq!(next.iter().map(|iv| iv.n).sum::<u64>(), c.grains());
            computed = next;
            if merged == 0 {
                break;
            }
        }
    }

    #[test]
    fn merge_policies_agree(c in config(40, 20)) {
        let eager = run_fast_spm_with(&c, MergePolicy::Eager).unwrap();
        let deferred = run_fast_spm_with(&c, MergePolicy::Deferred).unwrap();
        prop_assert_eq!(&eager.fixpoint, &deferred.fixpoint);
        prop_assert_eq!(eager.transient, deferred.transient);
        prop_assert_eq!(eager.merges, deferred.merges);
    }

    #[test]
    fn rules_conserve_grains_and_lower_phi(c in config(12, 9), k in 1usize..4) {
        for model in [Model::SPM, Model::ipm(k).unwrap()] {
            for mv in applicable_moves(&c, &model) {
                let next = apply_move(&c, &mv).unwrap();
                prop_assert_eq!(next.grains(), c.grains());
                prop_assert!(phi(&next) < phi(&c));
                prop_assert!(next.len() <= c.len() + 1 + k);
            }
        }
        let par = step_parallel(&c, &Model::SPM).unwrap();
        prop_assert_eq!(par.grains(), c.grains());
        let is_fixed = applicable_moves(&c, &Model::SPM).is_empty();
        prop_assert_eq!(par == c, is_fixed);
    }

    #[test]
    fn parallel_and_sequential_agree(c in config(20, 15)) {
        let (seq, _) = naive_seq(&c);
        let (par, _) = run_to_fixpoint_naive(&c, &Model::SPM, Mode::Parallel, LIMIT).unwrap();
        prop_assert_eq!(seq, par);
    }

    /// A cliff stays a cliff until it fires, whatever fires elsewhere.
    #[test]
    fn cliffs_persist(c in config(15, 12), picks in vec(any::<prop::sample::Index>(), 1..60)) {
        let mut current = c;
        for pick in picks {
            let moves = applicable_moves(&current, &Model::SPM);
            if moves.is_empty() {
                break;
            }
            let chosen = moves[pick.index(moves.len())];
            let next = apply_move(&current, &chosen).unwrap();
            let still: HashSet<usize> =
                applicable_moves(&next, &Model::SPM).iter().map(|m| m.source).collect();
            for mv in moves.iter().filter(|m| m.source != chosen.source) {
                prop_assert!(still.contains(&mv.source));
            }
            current = next;
        }
    }
}

#[test]
fn sequential_choice_does_not_matter() {
    let mut checked = 0;
    for len in 1..=4 {
        for c in all_configs(len, 4) {
            if c.grains() > 12 {
                continue;
            }
            let g = build_orbit_graph(&c, &Model::SPM, Mode::Sequential, 100_000).unwrap();
            let sinks = g.sinks();
            assert_eq!(sinks.len(), 1, "{c}");
            let (fp, steps) = naive_seq(&c);
            assert_eq!(g.vertices()[sinks[0]], fp);
            let (short, long) = path_lengths(&g).unwrap().unwrap();
            assert_eq!((short as u64, long as u64), (steps, steps), "{c}");
            checked += 1;
        }
    }
    assert!(checked > 500);
}

#[test]
fn arbitrary_orbits_are_lattices() {
    for len in 1..=3 {
        for c in all_configs(len, 4) {
            let g = build_orbit_graph(&c, &Model::SPM, Mode::Sequential, 100_000).unwrap();
            assert!(is_lattice(&g).unwrap(), "{c}");
        }
    }
}

#[test]
fn ipm_orbits_of_single_piles_are_lattices() {
    for k in 1..=3 {
        let model = Model::ipm(k).unwrap();
        for n in 0..=10 {
            let g = build_orbit_graph(
                &Configuration::single_pile(n),
                &model,
                Mode::Sequential,
                100_000,
            )
            .unwrap();
            topological_order(&g).unwrap();
            assert_eq!(g.sinks().len(), 1, "IPM({k}) n={n}");
            assert!(is_lattice(&g).unwrap(), "IPM({k}) n={n}");
            let (fp, _) = run_to_fixpoint_naive(
                &Configuration::single_pile(n),
                &model,
                Mode::Sequential,
                LIMIT,
            )
            .unwrap();
            assert_eq!(g.vertices()[g.sinks()[0]], fp);
        }
    }
}

/// The restriction of G(n) to length l coincides with the orbit graph of the
/// walled model.
#[test]
fn restriction_equals_walled_orbit() {
    for n in 1..=12u64 {
        let pile = Configuration::single_pile(n);
        let full = build_orbit_graph(&pile, &Model::SPM, Mode::Sequential, 100_000).unwrap();
        for l in 1..=f_n(n) as usize {
            let restricted = restrict_length(&full, l);
            let walled =
                build_orbit_graph(&pile, &Model::SPM.with_wall(l), Mode::Sequential, 100_000)
                    .unwrap();
            let vs: HashSet<_> = restricted.vertices().iter().cloned().collect();
            let ws: HashSet<_> = walled.vertices().iter().cloned().collect();
            assert_eq!(vs, ws, "n={n} l={l}");
            let edges = |g: &sandpile_core::OrbitGraph| -> HashSet<(Configuration, Configuration)> {
                g.edges()
                    .map(|(a, b)| (g.vertices()[a].clone(), g.vertices()[b].clone()))
                    .collect()
            };
            assert_eq!(edges(&restricted), edges(&walled), "n={n} l={l}");
        }
    }
}

#[test]
fn closed_form_length_is_f_n() {
    for n in 0..=1_000_000u64 {
        assert_eq!(closed_form_fixpoint(n).len() as u64, f_n(n), "n = {n}");
    }
}
