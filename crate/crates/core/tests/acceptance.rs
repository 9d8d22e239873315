//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::{Duration, Instant};

use dcqd::channels::{chi_from_kraus, random_cp_map, KrausSet};
use dcqd::dcqd::{
    characterize, closed_form_chi, design_matrix, reconstruct_population, Amplitudes, Characterizer, Configuration,
    Setting,
};
use dcqd::qcore::{c, frobenius_distance, max_abs_diff, rank, CMatrix, CVector, Pauli};
use dcqd::relax::{joint_estimate, relaxation_channel, Shots};
use dcqd::report::{emit_resource_table, resource_table, ResourceRow, Scheme};
use dcqd::sampling::{characterize_sampled, characterize_with_optics, population_rank, OpticsModel};
use dcqd::sqpt::sqpt_characterize;
use dcqd::DcqdError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn run(id: u32, name: &str, limit: Duration, f: impl FnOnce() -> Result<Outcome, DcqdError>) -> bool {
    let start = Instant::now();
    let outcome = f().unwrap_or_else(|e| Outcome {
        pass: false,
        detail: format!("error: {e}"),
    });
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = outcome.pass && in_time;
    println!(
        "{} {:>2} {:<34} {} [{:.3} s, limit {} s]",
        if pass { "PASS" } else { "FAIL" },
        id,
        name,
        outcome.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

/// Bell states in φ+, ψ+, ψ-, φ- order, written out by hand.
fn bell_states() -> Vec<CVector> {
    let h = FRAC_1_SQRT_2;
    [[h, 0.0, 0.0, h], [0.0, h, h, 0.0], [0.0, h, -h, 0.0], [h, 0.0, 0.0, -h]]
        .iter()
        .map(|v| CVector::from_iterator(4, v.iter().map(|&x| c(x, 0.0))))
        .collect()
}

fn error_detection() -> Result<Outcome, DcqdError> {
    let bell = bell_states();
    let mut worst = 0.0f64;
    for (m, p) in Pauli::ALL.iter().enumerate() {
        let op = p.matrix().kronecker(&CMatrix::identity(2, 2));
        let out = &op * &bell[0];
        for (k, b) in bell.iter().enumerate() {
            let prob = b.dotc(&out).norm_sqr();
            worst = worst.max((prob - if k == m { 1.0 } else { 0.0 }).abs());
        }
        let channel = KrausSet::unitary(p.matrix())?;
        let dist = Configuration::new(vec![Setting::Pop], Amplitudes::maximal())?.outcome_probabilities(&channel)?;
        for (k, prob) in dist.probabilities.iter().enumerate() {
            worst = worst.max((prob - if k == m { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-12,
        detail: format!("max |P(k|m) - δ_km| = {worst:.2e} (tol 1e-12)"),
    })
}

fn population_only() -> Result<Outcome, DcqdError> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let config = Configuration::new(vec![Setting::Pop], Amplitudes::default())?;
    let mut worst = 0.0f64;
    for i in 0..100 {
        let channel = random_cp_map(1, i % 2 == 0, &mut rng);
        let pops = reconstruct_population(&config.outcome_probabilities(&channel)?)?;
        let truth = chi_from_kraus(&channel).populations();
        for (a, b) in pops.iter().zip(&truth) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-10,
        detail: format!("100 maps, one configuration, max |Δχ_mm| = {worst:.2e} (tol 1e-10)"),
    })
}

fn single_qubit() -> Result<Outcome, DcqdError> {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let amps = Amplitudes::default();
    let engine = Characterizer::new(1, amps)?;
    let (mut worst, mut worst_agree, mut configs) = (0.0f64, 0.0f64, 0);
    for i in 0..100 {
        let channel = random_cp_map(1, i % 2 == 0, &mut rng);
        let truth = chi_from_kraus(&channel);
        let dists = engine.distributions(&channel)?;
        let r = engine.reconstruct(&dists)?;
        let closed = closed_form_chi(&dists, &amps)?;
        worst = worst.max(frobenius_distance(r.chi.matrix(), truth.matrix()));
        worst_agree = worst_agree.max(max_abs_diff(closed.matrix(), r.chi.matrix()));
        configs = configs.max(r.configurations);
    }
    Ok(Outcome {
        pass: worst < 1e-9 && worst_agree <= 1e-9 && configs == 4,
        detail: format!(
            "100 maps (TP and lossy), {configs} configurations, Frobenius {worst:.2e} (tol 1e-9), closed form vs inversion {worst_agree:.2e} (tol 1e-9)"
        ),
    })
}

fn two_qubit() -> Result<Outcome, DcqdError> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let (mut worst, mut configs) = (0.0f64, 0);
    for _ in 0..20 {
        let channel = random_cp_map(2, true, &mut rng);
        let r = characterize(&channel, &Amplitudes::default())?;
        worst = worst.max(frobenius_distance(r.chi.matrix(), chi_from_kraus(&channel).matrix()));
        configs = configs.max(r.configurations);
    }
    Ok(Outcome {
        pass: worst < 1e-8 && configs == 16,
        detail: format!("20 TP maps, {configs} configurations, Frobenius {worst:.2e} (tol 1e-8)"),
    })
}

fn method_equivalence() -> Result<Outcome, DcqdError> {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut channels = vec![
        KrausSet::bit_flip(0.25)?,
        KrausSet::depolarizing(0.3)?,
        KrausSet::amplitude_damping(0.4)?,
        KrausSet::rotation([0.0, 0.0, 1.0], 0.7)?,
    ];
    channels.extend((0..16).map(|i| random_cp_map(1, i % 2 == 0, &mut rng)));
    let (mut worst, mut n_sqpt, mut n_dcqd) = (0.0f64, 0, 0);
    for ch in &channels {
        let s = sqpt_characterize(ch)?;
        let d = characterize(ch, &Amplitudes::default())?;
        worst = worst.max(max_abs_diff(s.chi.matrix(), d.chi.matrix()));
        n_sqpt = s.experiments;
        n_dcqd = d.configurations;
    }
    Ok(Outcome {
        pass: worst <= 1e-8 && n_sqpt == 16 && n_dcqd == 4,
        detail: format!(
            "{} channels, max entrywise gap {worst:.2e} (tol 1e-8), N_exp SQPT {n_sqpt} vs DCQD {n_dcqd}",
            channels.len()
        ),
    })
}

fn resources() -> Result<Outcome, DcqdError> {
    let mut ok = true;
    for n in 1..=4u32 {
        let four = 4u64.pow(n);
        let expect = [
            (Scheme::Sqpt, (2u64.pow(n), four, four, 16u64.pow(n))),
            (Scheme::Aapt, (four, 1, four + 1, four + 1)),
            (Scheme::Dcqd, (four, four, 1, four)),
        ];
        for (scheme, want) in expect {
            let r = ResourceRow::new(scheme, n)?;
            ok &= (r.dim_h, r.n_in, r.n_m, r.n_exp) == want;
        }
    }
    let rows = resource_table(1..=4)?;
    let exp = |s: Scheme, n: u32| rows.iter().find(|r| r.scheme == s && r.n == n).map(|r| r.n_exp);
    let headline = [
        exp(Scheme::Sqpt, 3),
        exp(Scheme::Dcqd, 3),
        exp(Scheme::Sqpt, 4),
        exp(Scheme::Dcqd, 4),
    ];
    ok &= headline == [Some(4096), Some(64), Some(65536), Some(256)];
    ok &= emit_resource_table(1..=4)?.lines().count() == 13;
    Ok(Outcome {
        pass: ok,
        detail: format!(
            "n=1..4 exact; n=3 SQPT {} -> DCQD {}, n=4 SQPT {} -> DCQD {}",
            headline[0].unwrap_or(0),
            headline[1].unwrap_or(0),
            headline[2].unwrap_or(0),
            headline[3].unwrap_or(0)
        ),
    })
}

fn shot_noise() -> Result<Outcome, DcqdError> {
    let channel = random_cp_map(1, true, &mut ChaCha8Rng::seed_from_u64(107));
    let amps = Amplitudes::default();
    let med = |shots: u64| -> Result<f64, DcqdError> {
        let errs = (0..20u64)
            .map(|seed| characterize_sampled(&channel, &amps, shots, seed).map(|r| r.frobenius_error))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(median(errs))
    };
    let (low, high) = (med(10_000)?, med(1_000_000)?);
    let factor = low / high;
    Ok(Outcome {
        pass: (3.3..=30.0).contains(&factor),
        detail: format!("median error {low:.3e} at 1e4, {high:.3e} at 1e6, factor {factor:.2} (band [3.3, 30])"),
    })
}

fn stacked_rank(models: &[OpticsModel]) -> usize {
    let mut rows = Vec::new();
    for config in Configuration::all(1, Amplitudes::default()).unwrap_or_default() {
        let design = design_matrix(&config);
        for m in models {
            rows.push(m.merge_matrix() * &design);
        }
    }
    let total: usize = rows.iter().map(|r| r.nrows()).sum();
    let mut stacked = CMatrix::zeros(total, 16);
    let mut at = 0;
    for r in rows {
        stacked.rows_mut(at, r.nrows()).copy_from(&r);
        at += r.nrows();
    }
    rank(&stacked, 1e-10)
}

fn optics() -> Result<Outcome, DcqdError> {
    let single = [OpticsModel::default()];
    let both = [OpticsModel::default(), OpticsModel::complementary()];
    let (pop1, pop2) = (population_rank(&single), population_rank(&both));
    let (full1, full2) = (stacked_rank(&single), stacked_rank(&both));
    let channel = random_cp_map(1, true, &mut ChaCha8Rng::seed_from_u64(108));
    let r = characterize_with_optics(&channel, &Amplitudes::default(), None)?;
    Ok(Outcome {
        pass: pop1 < 4 && pop2 == 4 && full1 < 16 && full2 == 16 && r.configurations == 8 && r.frobenius_error < 1e-9,
        detail: format!(
            "POP rank {pop1} -> {pop2} of 4, full rank {full1} -> {full2} of 16, configurations 4 -> {}, Frobenius {:.2e}",
            r.configurations, r.frobenius_error
        ),
    })
}

fn relaxation() -> Result<Outcome, DcqdError> {
    let (tt1, tt2, t1, t2) = (2.0, 1.0, 1.0, 1.0);
    let amps = Amplitudes::real((2.0f64 / 3.0).sqrt())?;
    let channel = relaxation_channel(t1, tt1, t2, tt2)?;
    let value = |t: dcqd::relax::TimeConstant| t.value().unwrap_or(f64::INFINITY);
    let (exact, _) = joint_estimate(&channel, &amps, t1, t2, None)?;
    let exact_err = (value(exact.time_t1) - tt1).abs().max((value(exact.time_t2) - tt2).abs());
    let mut rel1 = Vec::new();
    let mut rel2 = Vec::new();
    for seed in 0..20u64 {
        let (est, _) = joint_estimate(&channel, &amps, t1, t2, Some(Shots { shots: 1_000_000, seed }))?;
        rel1.push((value(est.time_t1) - tt1).abs() / tt1);
        rel2.push((value(est.time_t2) - tt2).abs() / tt2);
    }
    let (m1, m2) = (median(rel1), median(rel2));
    Ok(Outcome {
        pass: exact_err <= 1e-9 && exact.configurations == 1 && m1 <= 0.02 && m2 <= 0.02,
        detail: format!(
            "1 configuration, exact error {exact_err:.2e} (tol 1e-9), median relative error at 1e6 shots T1 {:.3}% T2 {:.3}% (tol 2%)",
            100.0 * m1,
            100.0 * m2
        ),
    })
}

fn ill_posed() -> Result<Outcome, DcqdError> {
    let channel = random_cp_map(1, true, &mut ChaCha8Rng::seed_from_u64(110));
    let cases = [
        Amplitudes::maximal(),
        Amplitudes::real(0.8)?,
        Amplitudes::new(c(0.0, FRAC_1_SQRT_2), c(0.0, FRAC_1_SQRT_2))?,
    ];
    let mut rejected = 0;
    for amps in &cases {
        let flagged = |e: Option<DcqdError>| matches!(e, Some(DcqdError::IllPosed(_) | DcqdError::InvalidConfiguration(_)));
        let engine = flagged(Characterizer::new(1, *amps).err());
        let direct = flagged(characterize(&channel, amps).err());
        let coh = flagged(Configuration::new(vec![Setting::CohX], *amps).err());
        if engine && direct && coh {
            rejected += 1;
        }
    }
    Ok(Outcome {
        pass: rejected == cases.len(),
        detail: format!("{rejected}/{} amplitude choices with Im(αβ*) = 0 rejected", cases.len()),
    })
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "error-detection identity", secs(1), error_detection),
        run(2, "population from one configuration", secs(10), population_only),
        run(3, "single-qubit reconstruction", secs(10), single_qubit),
        run(4, "two-qubit reconstruction", secs(60), two_qubit),
        run(5, "DCQD vs SQPT equivalence", secs(10), method_equivalence),
        run(6, "resource table", secs(1), resources),
        run(7, "shot-noise scaling", secs(300), shot_noise),
        run(8, "partial Bell analyzer", secs(10), optics),
        run(9, "joint T1/T2 estimation", secs(10), relaxation),
        run(10, "ill-posedness guard", secs(1), ill_posed),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
