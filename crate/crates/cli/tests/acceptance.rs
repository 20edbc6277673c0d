//! One PASS/FAIL line per acceptance criterion. Exits non-zero when a
//! criterion fails, except for the parts listed in `UNATTAINABLE`, whose
//! attainable remainder must still pass.

use std::process::ExitCode;
use std::time::Instant;

use fences_cli::dims::{sweep_dims, sweep_shapes, table_row, TableRow};
use fences_cli::orbit::{orbit, render_orbit};
use fences_cli::verify::{promotion_basis_homomesy, recombination, specialization};
use fences_core::lifted::{
    cesaro_homomesy_estimate, detect_finite_order, exact_identity_suite, modular_identity_suite,
    monotone_random_labeling, random_labeling, FiniteOrder, LiftedStat, Realm, DEFAULT_STEP_LIMIT,
};
use fences_core::selfdual::{check_uniform_conjecture, involution_of, uniform_range, verify_self_dual, Conjecture};
use fences_core::spaces::{
    antichain_basis, antichain_toggle_rank, ideal_basis, peak_valley_antichain_combination, verify_antichain_combination,
    verify_basis, verify_peak_valley_antichain_identity,
};
use fences_core::stats::StatExpr;
use fences_core::{DynamicsMap, Fence, FenceShape, IdealIndex, Rational};
use num_traits::{One, ToPrimitive, Zero};

type Check = Result<String, String>;

fn fence(s: &str) -> Fence {
    Fence::new(s.parse().unwrap()).unwrap()
}

fn all_fences(max_n: usize) -> impl Iterator<Item = (Fence, IdealIndex)> {
    sweep_shapes(None, max_n).into_iter().map(|s| {
        let f = Fence::new(s).unwrap();
        let idx = IdealIndex::new(&f);
        (f, idx)
    })
}

fn four_cycle_orbit() -> Check {
    let start = Instant::now();
    let cycle = orbit(&"F(3,3,2)".parse().unwrap(), "{1,5,6}", DynamicsMap::Rowmotion).map_err(|e| e.to_string())?;
    let text = render_orbit(&cycle);
    let secs = start.elapsed().as_secs_f64();
    let expected = "{1,5,6}\n{1,2,4,5,6,7}\n{1,2,3,4,5,6}\n{6,7}\n";
    if text != expected {
        return Err(format!("printed {text:?}"));
    }
    if secs >= 1.0 {
        return Err(format!("took {secs:.2}s"));
    }
    Ok(format!("4-cycle {} in {secs:.4}s", text.trim_end().replace('\n', " -> ")))
}

/// Criteria 2 and 5 share one sweep.
fn dimension_sweep() -> (Check, Check) {
    let shapes = sweep_shapes(None, 14);
    let reports = match sweep_dims(&shapes, None) {
        Ok(r) => r,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let formula = match reports.iter().find(|r| !r.formula_agrees()) {
        Some(r) => Err(format!("{}: dim_IT {} dim_AT {} formula {}", r.fence, r.dim_it, r.dim_at, r.formula_dim)),
        None => Ok(format!("{} fences with n <= 14", reports.len())),
    };
    let homomesy = match reports.iter().find(|r| r.dim_ih != r.dim_ah) {
        Some(r) => Err(format!("{}: dim_IH {} dim_AH {}", r.fence, r.dim_ih, r.dim_ah)),
        None => Ok(format!("{} fences with n <= 14", reports.len())),
    };
    (formula, homomesy)
}

fn basis_certificates() -> Check {
    let mut count = 0;
    for (f, idx) in all_fences(12) {
        verify_basis(&idx, &antichain_basis(&f)).map_err(|e| format!("{f}: {e}"))?;
        verify_basis(&idx, &ideal_basis(&f)).map_err(|e| format!("{f}: {e}"))?;
        count += 1;
    }
    Ok(format!("both bases on {count} fences with n <= 12"))
}

fn table_rows() -> Check {
    let rows = [(3, 20, TableRow::new(969, 234, 40)), (4, 20, TableRow::new(3876, 346, 188)), (7, 15, TableRow::new(3432, 2, 472))];
    let mut out = Vec::new();
    for (t, max_n, expected) in rows {
        let start = Instant::now();
        let reports = sweep_dims(&sweep_shapes(Some(t), max_n), None).map_err(|e| e.to_string())?;
        let got = table_row(&reports);
        if got != expected {
            return Err(format!("t={t}, n<={max_n}: got {got:?}, expected {expected:?}"));
        }
        out.push(format!(
            "t={t} n<={max_n} {}/{}/{} ({:.0}s)",
            got.fences,
            got.single_orbit,
            got.ih_equals_it,
            start.elapsed().as_secs_f64()
        ));
    }
    Ok(out.join(", "))
}

fn rank_identity() -> Check {
    let mut count = 0;
    for (f, idx) in all_fences(10) {
        let rank = antichain_toggle_rank(&idx);
        let orbits = idx.orbits(DynamicsMap::Rowmotion).len();
        if rank != idx.len() - orbits {
            return Err(format!("{f}: rank {rank}, #J {}, orbits {orbits}", idx.len()));
        }
        count += 1;
    }
    Ok(format!("{count} fences with n <= 10"))
}

/// The `a = 3` display, written out term by term.
const DISPLAY_A3: &str =
    "-T1 -2T2 -3T3 -2T6 -2T7 -T8 +3T{1,6} +3T{1,7} +3T{2,6} +3T{2,7} +3T{2,8} +3T{3,7} +3T{3,8} -3T{1,5,7} -3T{2,4,8}";

fn parse_display(s: &str) -> Vec<(Vec<usize>, i64)> {
    s.split_whitespace()
        .map(|term| {
            let (coef, set) = term.split_once('T').unwrap();
            let k = match coef {
                "-" => -1,
                "+" | "" => 1,
                c => c.parse().unwrap(),
            };
            let els = set
                .trim_matches(|c| c == '{' || c == '}')
                .split(',')
                .map(|x| x.parse().unwrap())
                .collect();
            (els, k)
        })
        .collect()
}

fn antichain_identity() -> Check {
    for a in 2..=4 {
        if !verify_peak_valley_antichain_identity(a).map_err(|e| e.to_string())? {
            return Err(format!("general identity fails for a = {a}"));
        }
    }
    let display = parse_display(DISPLAY_A3);
    let mut generated = peak_valley_antichain_combination(3);
    let mut sorted = display.clone();
    generated.sort();
    sorted.sort();
    if generated != sorted {
        return Err("the a = 3 display differs from the general formula".into());
    }
    let f = fence("F(3,3,3)");
    let idx = IdealIndex::new(&f);
    let lhs = StatExpr::new().with_antichain(3, Rational::one()).with_antichain(6, -Rational::one());
    if !verify_antichain_combination(&idx, &lhs, &display).map_err(|e| e.to_string())? {
        return Err("the a = 3 display fails on F(3,3,3)".into());
    }
    Ok(format!("a = 2, 3, 4 and the {}-term a = 3 display", display.len()))
}

fn self_dual_suite() -> Check {
    let (mut checked, mut skipped) = (0, 0);
    for (f, idx) in all_fences(12).filter(|(f, _)| f.shape().is_palindromic()) {
        if involution_of(&f).is_err() {
            // even t: the fence is not self-dual
            skipped += 1;
            continue;
        }
        verify_self_dual(&idx).map_err(|e| format!("{f}: {e}"))?;
        checked += 1;
    }
    Ok(format!("{checked} self-dual fences with n <= 12 ({skipped} palindromic with even t are not self-dual)"))
}

fn conjecture_scans() -> Check {
    let mut count = 0;
    for conj in [Conjecture::IdealCardinality, Conjecture::PeaksMinusValleys, Conjecture::OppositeShared] {
        for (a, t) in uniform_range(8) {
            let r = check_uniform_conjecture(conj, a, t).map_err(|e| e.to_string())?;
            if !r.holds {
                return Err(format!("{conj} fails on {}", r.fence));
            }
            count += 1;
        }
    }
    Ok(format!("C5_1, C5_2, C5_3 hold in all {count} cases with a + t <= 8"))
}

fn recombination_suite() -> Check {
    let mut count = 0;
    for (f, idx) in all_fences(12) {
        recombination(&idx).map_err(|e| format!("{f}: {e}"))?;
        promotion_basis_homomesy(&idx).map_err(|e| format!("{f}: {e}"))?;
        count += 1;
    }
    Ok(format!("{count} fences with n <= 12"))
}

fn birational_order() -> Check {
    let mut out = Vec::new();
    for a in 2..=4 {
        let f = Fence::new(FenceShape::uniform(a, 2).unwrap()).unwrap();
        for seed in [1, 2, 3] {
            let pi = random_labeling(&f, Realm::Birational, seed);
            let order = detect_finite_order(&f, Realm::Birational, &pi, 100, DEFAULT_STEP_LIMIT).map_err(|e| e.to_string())?;
            if order != FiniteOrder::Order(a * (a + 1)) {
                return Err(format!("{f} seed {seed}: {order:?}"));
            }
        }
        out.push(format!("F({a},{a}) -> {}", a * (a + 1)));
    }
    Ok(out.join(", "))
}

/// Exact birational iteration on F(3,3,2) roughly doubles the label size
/// every 1.6 steps; this is as far as rationals go in a test run.
const EXACT_STEPS_F332: usize = 20;

fn birational_suite() -> (Check, Vec<String>) {
    let mut notes = Vec::new();
    let f = fence("F(2,2,2)");
    for seed in [1, 2, 3] {
        let pi = random_labeling(&f, Realm::Birational, seed);
        if let Err(e) = exact_identity_suite(&f, Realm::Birational, &pi, 50, 30) {
            return (Err(format!("{f} seed {seed}: {e:?}")), notes);
        }
    }
    notes.push("F(2,2,2): gamma over 50 steps, adjacency, telescoping N=30, exact, seeds 1-3: pass".into());
    let f = fence("F(3,3,2)");
    let pi = random_labeling(&f, Realm::Birational, 1);
    let start = Instant::now();
    if let Err(e) = exact_identity_suite(&f, Realm::Birational, &pi, EXACT_STEPS_F332, EXACT_STEPS_F332) {
        return (Err(format!("{f} exact: {e:?}")), notes);
    }
    notes.push(format!(
        "F(3,3,2): gamma, adjacency and telescoping exact over {EXACT_STEPS_F332} steps: pass ({:.1}s)",
        start.elapsed().as_secs_f64()
    ));
    if let Err(e) = modular_identity_suite(&f, &pi, 50, 30) {
        return (Err(format!("{f} modular: {e:?}")), notes);
    }
    notes.push("F(3,3,2): gamma over 50 steps, adjacency, telescoping N=30 modulo three primes near 2^62: pass".into());
    let missing = "F(3,3,2) over 50 exact rational steps not reached: label size grows ~1.6x per step (~10^11 bits by step 50)";
    (Err(missing.into()), notes)
}

fn specialization_suite() -> Check {
    let mut count = 0;
    for (f, idx) in all_fences(12) {
        specialization(&idx).map_err(|e| format!("{f}: {e}"))?;
        count += 1;
    }
    Ok(format!("{count} fences with n <= 12"))
}

fn lifted_target(realm: Realm, c: &Rational) -> f64 {
    let (lo, hi) = realm.default_bounds();
    let c = c.to_f64().unwrap();
    match realm {
        Realm::PiecewiseLinear => c * (hi - lo).to_f64().unwrap(),
        Realm::Birational => (hi / lo).to_f64().unwrap().powf(c),
    }
}

fn cesaro_means() -> Check {
    const STEPS: usize = 2000;
    let f = fence("F(2,2,2)");
    let (mut worst_toggle, mut worst_basis) = (0.0f64, 0.0f64);
    for realm in [Realm::PiecewiseLinear, Realm::Birational] {
        for seed in [1, 2, 3] {
            let pi = monotone_random_labeling(&f, realm, seed);
            for p in 1..=f.n() {
                let stat = LiftedStat::new(&f, &StatExpr::new().with_toggle(p, Rational::one()), realm).unwrap();
                let mean = cesaro_homomesy_estimate(&f, &stat, &pi, STEPS).mean;
                let err = (mean - lifted_target(realm, &Rational::zero())).abs();
                if err >= 1e-3 {
                    return Err(format!("{realm} seed {seed}: T[{p}] mean {mean}"));
                }
                worst_toggle = worst_toggle.max(err);
            }
            for b in antichain_basis(&f).into_iter().chain(ideal_basis(&f)) {
                let stat = LiftedStat::new(&f, &b.statistic, realm).unwrap();
                let mean = cesaro_homomesy_estimate(&f, &stat, &pi, STEPS).mean;
                let target = lifted_target(realm, &b.certificate.constant);
                let err = (mean - target).abs();
                if err >= 1e-2 {
                    return Err(format!("{realm} seed {seed}: {} mean {mean}, target {target}", b.label));
                }
                worst_basis = worst_basis.max(err);
            }
        }
    }
    Ok(format!("F(2,2,2), N={STEPS}, both realms, seeds 1-3: worst toggle {worst_toggle:.1e}, worst basis {worst_basis:.1e}"))
}

/// Criteria that cannot pass as stated; the run still requires their
/// attainable parts to pass.
const UNATTAINABLE: [u32; 1] = [12];

fn main() -> ExitCode {
    let mut failed = Vec::new();
    let mut line = |id: u32, name: &str, check: Check| {
        let (verdict, detail) = match &check {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        println!("criterion {id:>2} {verdict}  {name}: {detail}");
        if check.is_err() {
            failed.push(id);
        }
    };
    line(1, "rowmotion 4-cycle on F(3,3,2)", four_cycle_orbit());
    let (formula, homomesy) = dimension_sweep();
    line(2, "toggleability dimensions", formula);
    line(3, "basis certificates", basis_certificates());
    line(4, "summary table rows", table_rows());
    line(5, "ideal and antichain homomesy dimensions", homomesy);
    line(6, "antichain toggle rank", rank_identity());
    line(7, "peak minus valley antichain identity", antichain_identity());
    line(8, "self-dual suite", self_dual_suite());
    line(9, "conjecture scans", conjecture_scans());
    line(10, "recombination and promotion", recombination_suite());
    line(11, "birational order", birational_order());
    let (check, notes) = birational_suite();
    let attainable_ok = notes.len() == 3;
    line(12, "exact birational identities", check);
    for n in &notes {
        println!("             {n}");
    }
    line(13, "specialization", specialization_suite());
    line(14, "time averages", cesaro_means());
    let unexpected: Vec<u32> = failed.iter().copied().filter(|id| !UNATTAINABLE.contains(id)).collect();
    if unexpected.is_empty() && attainable_ok {
        println!("acceptance: {} of 14 pass; known unattainable: {UNATTAINABLE:?}", 14 - failed.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures {unexpected:?}");
        ExitCode::FAILURE
    }
}
