mod common;

use common::{brute_ground, random_network, NetSpec};
use fluxlogic::gates::{self, add_input_cell, GateParams, Literal};
use fluxlogic::verify::{check_edc, check_gate, row_inputs};
use fluxlogic::{BoolFn, CellId, ExactOptions, GateHandle, Logic, Model, Network};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODELS: [Model; 2] = [Model::Quadratic, Model::Mismatch];

type Builder = fn(&mut Network, &[CellId], &GateParams) -> GateHandle;

/// Every logic gate with its input count and per-output function.
fn logic_gates() -> Vec<(&'static str, usize, Vec<BoolFn>, Builder)> {
    vec![
        ("inv", 1, vec![BoolFn::Not], |n, i, p| {
            gates::inverter(n, i[0], 1, p).unwrap()
        }),
        ("fanout2", 1, vec![BoolFn::Not; 2], |n, i, p| {
            gates::inverter(n, i[0], 2, p).unwrap()
        }),
        ("fanout4", 1, vec![BoolFn::Not; 4], |n, i, p| {
            gates::inverter(n, i[0], 4, p).unwrap()
        }),
        ("wire", 1, vec![BoolFn::Buf], |n, i, p| {
            gates::wire(n, i[0], p).unwrap()
        }),
        ("nandnor", 2, vec![BoolFn::Nand, BoolFn::Nor], |n, i, p| {
            gates::nand_nor(n, i[0], i[1], p).unwrap()
        }),
        ("sand", 2, vec![BoolFn::And], |n, i, p| {
            gates::sand(n, i[0], i[1], p).unwrap()
        }),
        ("or", 2, vec![BoolFn::Or], |n, i, p| {
            gates::or_gate(n, i[0], i[1], p).unwrap()
        }),
    ]
}

fn build(k: usize, f: Builder, p: &GateParams) -> (Network, GateHandle) {
    let mut net = Network::new();
    let inputs: Vec<CellId> = (0..k).map(|_| add_input_cell(&mut net)).collect();
    let h = f(&mut net, &inputs, p);
    (net, h)
}

/// Per clamped row, the oracle ground set projected on the outputs is
/// exactly the function value.
#[test]
fn static_logic_soundness() {
    let p = GateParams::default();
    for (name, k, fns, f) in logic_gates() {
        let (net, h) = build(k, f, &p);
        for model in MODELS {
            for r in 0..1 << k {
                let row = row_inputs(r, k);
                let clamps: Vec<(CellId, Logic)> =
                    h.inputs.iter().copied().zip(row.iter().copied()).collect();
                let clamped = net.with_clamps(&clamps).unwrap();
                let (_, ground) = brute_ground(&clamped, model, 1e-9);
                let xs: Vec<bool> = row.iter().map(|v| v.bit()).collect();
                let want: Vec<bool> = fns.iter().map(|g| g.eval(&xs)).collect();
                for g in &ground {
                    let got: Vec<bool> = h.outputs.iter().map(|o| g[o.0]).collect();
                    assert_eq!(got, want, "{name} {model} row {r}");
                }
                assert!(!ground.is_empty());
            }
            let report = check_gate(&net, &h, &fns, model, &ExactOptions::default()).unwrap();
            assert_eq!(report.passed, Some(true), "{name} {model}");
        }
    }
}

#[test]
fn edc_degeneracy_at_defaults() {
    let p = GateParams::default();
    let opts = ExactOptions::default();
    for (name, k, _, f) in logic_gates() {
        let (net, _) = build(k, f, &p);
        let r = check_edc(&net, k, Model::Mismatch, &opts).unwrap();
        assert!(r.passed, "{name}: {r:?}");
        let (_, ground) = brute_ground(&net, Model::Mismatch, 1e-9);
        assert_eq!(ground.len(), 1 << k, "{name}");
    }
}

#[test]
fn fanout_input_free_has_two_ground_states() {
    let p = GateParams::default();
    for n in [1, 2, 4] {
        let mut net = Network::new();
        let i = add_input_cell(&mut net);
        gates::inverter(&mut net, i, n, &p).unwrap();
        for model in MODELS {
            let (_, ground) = brute_ground(&net, model, 1e-9);
            let mut zero = vec![false];
            zero.extend(vec![true; n]);
            let mut one = vec![true];
            one.extend(vec![false; n]);
            assert_eq!(
                ground,
                vec![zero.clone(), one.clone()],
                "fanout {n} {model}"
            );
        }
    }
}

#[test]
fn three_ce_flags_violated_clauses() {
    let p = GateParams::default();
    for polarity in 0..8 {
        let mut net = Network::new();
        let vars: Vec<CellId> = (0..3).map(|_| add_input_cell(&mut net)).collect();
        let positive = |k: usize| (polarity >> k) & 1 == 1;
        let lits = [0, 1, 2].map(|k| Literal {
            cell: vars[k],
            positive: positive(k),
        });
        let h = gates::three_ce(&mut net, lits, &p).unwrap();
        let v = h.output();
        for values in 0..8 {
            let x = |k: usize| (values >> k) & 1 == 1;
            let violated = (0..3).all(|k| x(k) != positive(k));
            let clamps: Vec<(CellId, Logic)> =
                (0..3).map(|k| (vars[k], Logic::from_bit(x(k)))).collect();
            let clamped = net.with_clamps(&clamps).unwrap();
            let (min, ground) = brute_ground(&clamped, Model::Mismatch, 1e-9);
            assert_eq!(ground.len(), 1);
            assert_eq!(
                ground[0][v.0], violated,
                "polarity {polarity} values {values}"
            );
            let want = if violated { p.dedlu_strength } else { 0.0 };
            assert!((min - want).abs() <= 1e-12);
        }
    }
}

#[test]
fn edl_halves_degeneracy() {
    let p = GateParams::default();
    let opts = ExactOptions::default();
    for (name, k, _, f) in logic_gates() {
        let (mut net, h) = build(k, f, &p);
        gates::edl(&mut net, h.inputs[0], Logic::One, 0.5, Model::Mismatch).unwrap();
        let r = fluxlogic::solve_exact(&net, Model::Mismatch, &opts).unwrap();
        assert_eq!(r.degeneracy, Some(1u128 << (k - 1)), "{name}");
    }
}

#[test]
fn edl_gap_is_phi0_times_strength() {
    for s in [0.01, 0.05, 0.1] {
        let mut net = Network::new();
        let c = net.add_cell("c", 0.0).unwrap();
        gates::edl(&mut net, c, Logic::One, s, Model::Quadratic).unwrap();
        let r = fluxlogic::solve_exact(&net, Model::Quadratic, &ExactOptions::default()).unwrap();
        let phi0 = net.constants().phi0;
        let l = net.cell(c).unwrap().inductance();
        assert!((r.gap.unwrap() - phi0 * s / l).abs() <= 1e-9);
        assert_eq!(r.ground_states[0].get(c), Logic::One);
    }
}

/// Builds a NAND/NOR gate at `(delta, d)` and reports whether it verifies.
fn nand_nor_verifies(delta: f64, d: f64, model: Model) -> bool {
    let mut net = Network::new();
    let a = add_input_cell(&mut net);
    let b = add_input_cell(&mut net);
    let h = gates::nand_nor_unchecked(&mut net, a, b, delta, d).unwrap();
    let r = check_gate(
        &net,
        &h,
        &[BoolFn::Nand, BoolFn::Nor],
        model,
        &ExactOptions::default(),
    )
    .unwrap();
    r.passed == Some(true) && !r.has_ambiguous()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn window_pairs_verify(u in 0.01f64..0.99, v in 0.01f64..0.99) {
        // D in (0, 0.25), then 2 delta uniform in (D, 0.5 - D).
        let d = 0.25 * u;
        let two_delta = d + v * (0.5 - 2.0 * d);
        let delta = two_delta / 2.0;
        prop_assert!(GateParams::new(delta, d).is_ok());
        for model in MODELS {
            prop_assert!(nand_nor_verifies(delta, d, model), "delta {delta} d {d} {model}");
        }
    }

    #[test]
    fn violating_pairs_fail_quadratic(low in any::<bool>(), u in 0.01f64..0.99, v in 0.01f64..0.99) {
        let (delta, d) = if low {
            // D >= 2 delta
            let d = 0.01 + 0.48 * u;
            (d / 2.0 * v, d)
        } else {
            // 2 delta >= 1/2 - D
            let d = 0.01 + 0.48 * u;
            ((0.5 - d) / 2.0 * (1.0 + v), d)
        };
        prop_assert!(GateParams::new(delta, d).is_err());
        prop_assert!(!nand_nor_verifies(delta, d, Model::Quadratic), "delta {delta} d {d}");
    }

    #[test]
    fn clamping_monotonicity(seed in any::<u64>(), cells in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = NetSpec::standard(cells);
        spec.penalty_prob = 0.2;
        let net = random_network(&mut rng, spec);
        for model in MODELS {
            let (min, ground) = brute_ground(&net, model, 1e-9);
            let g = &ground[rng.random_range(0..ground.len())];
            let c = CellId(rng.random_range(0..cells));
            let clamped = net.with_clamps(&[(c, Logic::from_bit(g[c.0]))]).unwrap();
            let (cmin, _) = brute_ground(&clamped, model, 1e-9);
            prop_assert!(cmin <= min + 1e-12);
        }
    }
}

/// Disjoint gates: the mismatch ground set is the Cartesian product.
#[test]
fn composability() {
    let p = GateParams::default();
    let list = logic_gates();
    for (na, ka, _, fa) in &list {
        for (nb, kb, _, fb) in &list {
            let (a_net, _) = build(*ka, *fa, &p);
            let (b_net, _) = build(*kb, *fb, &p);
            let mut both = Network::new();
            let ia: Vec<CellId> = (0..*ka).map(|_| add_input_cell(&mut both)).collect();
            fa(&mut both, &ia, &p);
            let ib: Vec<CellId> = (0..*kb).map(|_| add_input_cell(&mut both)).collect();
            fb(&mut both, &ib, &p);
            assert_eq!(both.len(), a_net.len() + b_net.len());

            let (_, ga) = brute_ground(&a_net, Model::Mismatch, 1e-9);
            let (_, gb) = brute_ground(&b_net, Model::Mismatch, 1e-9);
            let mut product: Vec<Vec<bool>> = ga
                .iter()
                .flat_map(|x| gb.iter().map(move |y| [x.clone(), y.clone()].concat()))
                .collect();
            product.sort();
            let (_, g) = brute_ground(&both, Model::Mismatch, 1e-9);
            assert_eq!(g, product, "{na} + {nb}");
        }
    }
}
