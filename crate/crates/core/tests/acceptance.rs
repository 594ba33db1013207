//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use gradnorm::asymptotics::theorem_c_experiment;
use gradnorm::fixtures::{degree_one_p1, floor_g_p1, identity_weights_p1};
use gradnorm::norms::{
    dinf, ext_power, quotient_norm, relative_spectrum, vol, vol_by_determinant, DiagNorm,
};
use gradnorm::okounkov::{
    corner_deleted_p2, equidistribution_check, fujita_check, gamma_slice, mu_measure, phi_table,
    superlevel, MonomialOrder,
};
use gradnorm::potential_p1::{
    fs_skeleton, random_potential, sup_abs_diff, supnorm_toric, theorem_b_experiment,
};
use gradnorm::potential_p1::{PLConvex, Piece};
use gradnorm::random::{random_diag_norm, random_matrix, random_rats, scrambled_pair};
use gradnorm::rat::{abs, int, rat, Rat};
use gradnorm::section_ring::{submultiplicativity_check, GradedNorm, GradedNormSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(elapsed < Duration::from_secs(limit_secs), || {
        format!("took {:.2} s, limit {limit_secs} s", elapsed.as_secs_f64())
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn err(e: gradnorm::Error) -> String {
    e.to_string()
}

fn spectrum_recovery() -> Check {
    let start = Instant::now();
    let mut r = rng(1001);
    let mut pairs = 0;
    for d in 2..=6 {
        for i in 0..100 {
            let ram = if i % 2 == 0 { 1 } else { 2 };
            let (a, b, expected) = scrambled_pair(&mut r, d, ram);
            let got = relative_spectrum(&a, &b).map_err(err)?;
            ensure(got == expected, || {
                format!("d = {d}, pair {i}: expected {expected:?}, got {got:?}")
            })?;
            pairs += 1;
        }
    }
    within(start.elapsed(), 10)?;
    Ok(format!("{pairs} scrambled pairs recovered exactly"))
}

fn determinant_identity() -> Check {
    let mut r = rng(1002);
    for i in 0..200 {
        let d = r.gen_range(1..=5);
        let ram = r.gen_range(1..=2);
        let (a, b) = (
            random_diag_norm(&mut r, d, ram),
            random_diag_norm(&mut r, d, ram),
        );
        let sum: Rat = relative_spectrum(&a, &b)
            .map_err(err)?
            .lambdas()
            .iter()
            .sum();
        let det = vol_by_determinant(&a, &b).map_err(err)? * int(d as i64);
        // Independent route: the one-dimensional spectrum of the top exterior powers.
        let (ta, tb) = (
            ext_power(&a, d).map_err(err)?,
            ext_power(&b, d).map_err(err)?,
        );
        let top = relative_spectrum(&ta, &tb).map_err(err)?.lambdas()[0].clone();
        ensure(sum == det && sum == top, || {
            format!("pair {i}: Σλ = {sum}, d·vol = {det}, top = {top}")
        })?;
    }
    Ok("200 pairs".into())
}

fn cocycle_lipschitz_contraction() -> Check {
    let mut r = rng(1003);
    for i in 0..200 {
        let d = r.gen_range(1..=4);
        let (a, b, c) = (
            random_diag_norm(&mut r, d, 1),
            random_diag_norm(&mut r, d, 1),
            random_diag_norm(&mut r, d, 1),
        );
        let (ab, ac, cb) = (
            vol(&a, &b).map_err(err)?,
            vol(&a, &c).map_err(err)?,
            vol(&c, &b).map_err(err)?,
        );
        ensure(ab == &ac + &cb, || {
            format!("cocycle, triple {i}: {ab} != {ac} + {cb}")
        })?;
        let gap = abs(&(ac - vol(&b, &c).map_err(err)?));
        let bound = dinf(&a, &b).map_err(err)?;
        ensure(gap <= bound, || {
            format!("Lipschitz, triple {i}: {gap} > {bound}")
        })?;
    }
    let mut done = 0;
    let mut tries = 0;
    while done < 200 {
        tries += 1;
        let d = r.gen_range(2..=3);
        let e = r.gen_range(1..d);
        let (a, b) = (
            random_diag_norm(&mut r, d, 1),
            random_diag_norm(&mut r, d, 1),
        );
        let map = random_matrix(&mut r, e, d, 1);
        // Rank-deficient maps are not quotients; draw again.
        let (Ok(qa), Ok(qb)) = (quotient_norm(&a, &map), quotient_norm(&b, &map)) else {
            continue;
        };
        let (q, full) = (dinf(&qa, &qb).map_err(err)?, dinf(&a, &b).map_err(err)?);
        ensure(q <= full, || {
            format!("contraction, instance {done}: {q} > {full}")
        })?;
        done += 1;
    }
    Ok(format!(
        "200 cocycle, 200 Lipschitz, 200 quotient instances ({tries} maps drawn)"
    ))
}

fn theorem_b_exact() -> Check {
    let start = Instant::now();
    let degrees: Vec<u32> = (1..=64).collect();
    let t = theorem_b_experiment(
        &degree_one_p1(int(0), int(0)),
        &degree_one_p1(rat(3, 2), int(0)),
        &degrees,
    )
    .map_err(err)?;
    for row in &t.rows {
        ensure(
            row.energy == rat(-3, 4) && row.vol_over_m == rat(-3, 4),
            || {
                format!(
                    "m = {}: E = {}, vol/m = {}",
                    row.m, row.energy, row.vol_over_m
                )
            },
        )?;
    }
    let mut r = rng(1004);
    for _ in 0..5 {
        let w: Vec<Rat> = random_rats(&mut r, 4, 5);
        let (a, b) = (
            degree_one_p1(w[0].clone(), w[1].clone()),
            degree_one_p1(w[2].clone(), w[3].clone()),
        );
        let t = theorem_b_experiment(&a, &b, &[1, 7, 16, 64]).map_err(err)?;
        ensure(
            t.rows.iter().all(|row| row.energy == row.vol_over_m),
            || format!("degree-one pair {w:?}: {:?}", t.gaps()),
        )?;
    }
    within(start.elapsed(), 5)?;
    Ok("E_m = vol_m/m = -3/4 for m = 1..=64; 5 more degree-one pairs exact".into())
}

fn theorem_c() -> Check {
    let start = Instant::now();
    let table = theorem_c_experiment(
        &floor_g_p1(),
        &GradedNormSpec::trivial(1),
        &[1, 2, 4, 8, 16],
        &[16, 32, 64],
    )
    .map_err(err)?;
    let gaps = table.gaps();
    ensure(gaps.windows(2).all(|w| w[1] <= w[0]), || {
        format!("gaps not non-increasing: {gaps:?}")
    })?;
    let last = gaps.last().expect("five rows");
    ensure(*last < rat(1, 20), || format!("gap at k = 16 is {last}"))?;
    within(start.elapsed(), 60)?;
    Ok(format!(
        "gaps {}",
        gaps.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn equidistribution() -> Check {
    let order = MonomialOrder::lex(1);
    let ks: Vec<u32> = (1..=64).collect();
    let id = phi_table(
        &GradedNorm::new(identity_weights_p1()).map_err(err)?,
        64,
        &order,
    )
    .map_err(err)?;
    let rep = equidistribution_check(&id, &ks, 64, 0).map_err(err)?;
    ensure(rep.exact, || "distance not exact".into())?;
    for row in &rep.rows {
        ensure(row.distance <= rat(1, row.k as i64 + 1), || {
            format!("k = {}: distance {}", row.k, row.distance)
        })?;
    }
    let g = phi_table(&GradedNorm::new(floor_g_p1()).map_err(err)?, 64, &order).map_err(err)?;
    let rep = equidistribution_check(&g, &[64], 64, 0).map_err(err)?;
    let dist = &rep.rows[0].distance;
    ensure(*dist < rat(1, 10), || {
        format!("floor fixture at k = 64: distance {dist}")
    })?;
    Ok(format!(
        "identity fixture k = 1..=64 within 1/(k+1); floor fixture at 64: {dist}"
    ))
}

fn okounkov_counts() -> Check {
    for m in 0..=100u32 {
        let (p1, p2) = (
            gamma_slice(1, m).len() as u32,
            gamma_slice(2, m).len() as u32,
        );
        ensure(p1 == m + 1 && p2 == (m + 1) * (m + 2) / 2, || {
            format!("m = {m}: {p1}, {p2}")
        })?;
    }
    let phi = phi_table(
        &GradedNorm::new(identity_weights_p1()).map_err(err)?,
        32,
        &MonomialOrder::lex(1),
    )
    .map_err(err)?;
    let mut checked = 0;
    for k in 1..=32u32 {
        let mu = mu_measure(&phi, k).map_err(err)?;
        let total = int(k as i64 + 1);
        for j in -1..=(k as i64 + 1) {
            for t in [rat(j, k as i64), rat(2 * j + 1, 2 * k as i64)] {
                let count = superlevel(&phi, Some(&t), k).count(k);
                let ratio = int(count as i64) / &total;
                ensure(mu.upper_tail(&t) == ratio, || {
                    format!("k = {k}, t = {t}: {} vs {ratio}", mu.upper_tail(&t))
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "counts for m <= 100; {checked} superlevel masses match"
    ))
}

fn fujita() -> Check {
    let g = corner_deleted_p2(48);
    let rep = fujita_check(&g, &[1, 2, 4, 8, 16], 48).map_err(err)?;
    let est = rep.estimates();
    ensure(est.windows(2).all(|w| w[0] <= w[1]), || {
        format!("estimates not increasing: {est:?}")
    })?;
    ensure(est[0] < est[1], || "k = 1 row is not smaller".into())?;
    let gap = &rep.rows.last().expect("rows").gap;
    ensure(*gap < rat(1, 20), || format!("gap at k = 16 is {gap}"))?;
    ensure(rep.rows.iter().all(|r| r.inclusion_holds), || {
        "Γ^k not inside Γ".into()
    })?;
    ensure(rep.compact_slice.holds_from.is_some(), || {
        "compact-slice audit failed".into()
    })?;
    Ok(format!(
        "estimates {}; full {}",
        est.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", "),
        rep.full_estimate
    ))
}

fn audits() -> Check {
    let mut r = rng(1009);
    let fixtures = vec![
        ("floor_g_p1", floor_g_p1()),
        ("identity_weights_p1", identity_weights_p1()),
        ("degree_one_p1(0, 3/2)", degree_one_p1(int(0), rat(3, 2))),
        (
            "truncated floor_g_p1, k = 2",
            GradedNormSpec::truncated(floor_g_p1(), 2),
        ),
        ("trivial P^2", GradedNormSpec::trivial(2)),
        (
            "random degree-one P^1",
            GradedNormSpec::degree_one(1, random_diag_norm(&mut r, 2, 1)),
        ),
        (
            "random degree-one P^2",
            GradedNormSpec::degree_one(2, random_diag_norm(&mut r, 3, 1)),
        ),
    ];
    let mut products = 0;
    for (name, spec) in fixtures {
        let d = spec.n;
        let g = GradedNorm::new(spec).map_err(err)?;
        let max = if d == 1 { 10 } else { 6 };
        for order in [MonomialOrder::lex(d), MonomialOrder::grlex(d)] {
            let phi = phi_table(&g, max, &order).map_err(err)?;
            if let Some(v) = phi.superadditivity_violation(max) {
                return Err(format!("{name}: Φ not superadditive: {v:?}"));
            }
        }
        let rep = submultiplicativity_check(&g, max.min(8), 3, &mut r).map_err(err)?;
        ensure(rep.passed(), || {
            format!("{name}: submultiplicativity fails: {:?}", rep.violation)
        })?;
        products += rep.products_checked;
    }
    Ok(format!("7 fixtures, {products} products audited"))
}

fn fs_n_inequalities() -> Check {
    let mut r = rng(1010);
    for i in 0..100 {
        let m = r.gen_range(1..=16u32);
        let norm = DiagNorm::monomial(random_rats(&mut r, m as usize + 1, 8));
        let u = fs_skeleton(&norm, m).map_err(err)?;
        let back = supnorm_toric(&u, m).map_err(err)?;
        let (w, wb) = (
            norm.weights().to_vec(),
            back.monomial_weights().expect("monomial"),
        );
        ensure(w.iter().zip(&wb).all(|(a, b)| a <= b), || {
            format!("norm {i}: {w:?} vs {wb:?}")
        })?;
        let again = fs_skeleton(&back, m).map_err(err)?;
        ensure(again == u, || format!("norm {i}: FS∘N∘FS differs"))?;

        let v = random_potential(&mut r, 4, 6);
        let fv = fs_skeleton(&supnorm_toric(&v, m).map_err(err)?, m).map_err(err)?;
        let below = v
            .kinks()
            .iter()
            .chain(fv.kinks().iter())
            .all(|x| fv.eval(x) <= v.eval(x));
        ensure(
            below && fv.min_slope() >= v.min_slope() && fv.max_slope() <= v.max_slope(),
            || format!("norm {i}: FS(N(v)) exceeds v"),
        )?;
        let v2 = random_potential(&mut r, 4, 6);
        let lhs = dinf(
            &supnorm_toric(&v, m).map_err(err)?,
            &supnorm_toric(&v2, m).map_err(err)?,
        )
        .map_err(err)?;
        let rhs = int(m as i64) * sup_abs_diff(&v, &v2).expect("same end slopes");
        ensure(lhs <= rhs, || format!("norm {i}: Lipschitz {lhs} > {rhs}"))?;
    }
    // Slopes on the 1/m grid with kinks representable at level m come back exactly.
    let u = PLConvex::new(vec![
        Piece::new(int(-1), int(0)),
        Piece::new(rat(-1, 4), rat(3, 4)),
        Piece::new(int(0), int(1)),
    ])
    .map_err(err)?;
    ensure(
        fs_skeleton(&supnorm_toric(&u, 4).map_err(err)?, 4).map_err(err)? == u,
        || "grid potential not reproduced".into(),
    )?;
    Ok("100 toric norms".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("spectrum recovery", spectrum_recovery),
        ("determinant identity", determinant_identity),
        (
            "cocycle, Lipschitz, quotient contraction",
            cocycle_lipschitz_contraction,
        ),
        ("energy equals volume, degree-one toric", theorem_b_exact),
        ("truncation volumes converge", theorem_c),
        ("equidistribution", equidistribution),
        ("Okounkov counts and superlevel masses", okounkov_counts),
        ("truncated semigroup volumes", fujita),
        ("superadditivity and submultiplicativity audits", audits),
        ("FS/N inequalities and idempotence", fs_n_inequalities),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS ({secs:.2} s) {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL ({secs:.2} s) {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
