//! Acceptance checks. Prints one line per criterion and fails if any does.
//!
//! Run with `cargo test -p dmac-core --test acceptance`.

use std::time::{Duration, Instant};

use dmac_core::analysis::{
    self, brute_force_collisions, build_oracle, count_ops_blocks, direction_collisions,
    measure_girth, mirror_blocks, mirror_direction, mirror_message, structure_checks,
    CollisionKind,
};
use dmac_core::field::next_prime_at_least;
use dmac_core::mac::block_directions;
use dmac_core::{
    dmac, dmac_blocks, dmac_bytes, keygen, trace_blocks, verify, walk_step, Encoding,
    GraphParams, MacKey, MacParams, PrimeModulus, TagMode, Variant, Vertex, WalkState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(elapsed: Duration, budget: Duration) -> Result<(), String> {
    check(elapsed < budget, || {
        format!("took {elapsed:?}, budget {budget:?}")
    })
}

fn example_one_neighbor() -> Outcome {
    let start = Instant::now();
    let g = GraphParams::new(6, PrimeModulus::new(11).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let p = Vertex::point(vec![1, 8, 4, 2, 7, 0]);
    let t = g.modulus().element(3).map_err(|e| e.to_string())?;
    let l = g.neighbor(&p, t, 1).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(l == Vertex::line(vec![5, 2, 6, 9, 5, 9]), || format!("got {l}"))?;
    within_budget(elapsed, Duration::from_millis(1))?;
    Ok(format!("N_3(1,8,4,2,7,0) = {l} in {elapsed:?}"))
}

fn toy_example() -> Outcome {
    let params = MacParams::new(29, 25, 3, 33554467, 15)
        .map_err(|e| e.to_string())?
        .with_encoding(Encoding::DecimalConcat);
    let key = MacKey::new(vec![5, 10, 27], vec![26, 0, 24]);
    let start = Instant::now();
    let trace = trace_blocks(&[28140, 20198520, 112830240], &key, &params)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = [
        Vertex::line(vec![20388289, 1278039, 6390199]),
        Vertex::point(vec![17802608, 23169852, 2257462]),
        Vertex::line(vec![31812583, 28043200, 12949176]),
    ];
    for (i, want) in expected.iter().enumerate() {
        check(&trace.states[i] == want, || {
            format!("v_{} = {}, expected {want}", i + 1, trace.states[i])
        })?;
    }
    within_budget(elapsed, Duration::from_millis(1))?;
    Ok(format!("v_1..v_3 match, tag {} in {elapsed:?}", trace.tag))
}

fn girth_floor() -> Outcome {
    let start = Instant::now();
    let mut found = Vec::new();
    for (n, q, floor) in [(2, 3, 6), (3, 3, 8), (2, 5, 6)] {
        let o = build_oracle(n, q).map_err(|e| e.to_string())?;
        let g = measure_girth(&o);
        check(g.is_none_or(|g| g >= floor), || {
            format!("girth of D({n},{q}) is {g:?}, below {floor}")
        })?;
        found.push(format!(
            "D({n},{q})={}",
            g.map_or_else(|| "inf".into(), |g| g.to_string())
        ));
    }
    within_budget(start.elapsed(), Duration::from_secs(10))?;
    Ok(found.join(", "))
}

fn structure() -> Outcome {
    let start = Instant::now();
    for (n, q) in [(2, 3), (3, 3), (2, 5), (3, 5), (4, 3)] {
        let o = build_oracle(n, q).map_err(|e| e.to_string())?;
        let r = structure_checks(&o);
        let order = 2 * (q as usize).pow(n as u32);
        check(r.vertices == order, || format!("D({n},{q}) has {} vertices", r.vertices))?;
        check(r.regular && r.min_degree == q as usize, || {
            format!("D({n},{q}) degrees {}..{}", r.min_degree, r.max_degree)
        })?;
        check(r.bipartite && r.symmetric, || format!("D({n},{q}) not bipartite"))?;
    }
    let r = structure_checks(&build_oracle(6, 2).map_err(|e| e.to_string())?);
    check(r.components > 1, || "D(6,2) is connected".into())?;
    within_budget(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("5 graphs q-regular and bipartite; D(6,2) has {} components", r.components))
}

fn spectral_bound() -> Outcome {
    let start = Instant::now();
    let mut found = Vec::new();
    for q in [3, 5, 7] {
        let s = analysis::spectrum(&build_oracle(2, q).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let l1 = s.second.ok_or("no second eigenvalue")?;
        check(s.max_residual <= 1e-6, || format!("residual {}", s.max_residual))?;
        check(l1 <= s.bound + 1e-6, || format!("D(2,{q}): lambda1 {l1} > {}", s.bound))?;
        check(s.symmetric(), || format!("D(2,{q}): asymmetry {}", s.asymmetry))?;
        found.push(format!("q={q}: {l1:.4} <= {:.4}", s.bound));
    }
    within_budget(start.elapsed(), Duration::from_secs(5))?;
    Ok(found.join(", "))
}

fn avalanche() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut found = Vec::new();
    for variant in [Variant::Dmac1, Variant::Dmac2] {
        let params = MacParams::default_profile().with_variant(variant);
        let key = keygen(&params, 10, &mut rng).map_err(|e| e.to_string())?;
        let r = analysis::avalanche(&params, &key, 1000, 256, &mut rng).map_err(|e| e.to_string())?;
        check((96.0..=160.0).contains(&r.mean), || format!("{variant}: mean {}", r.mean))?;
        found.push(format!("{variant} mean {:.2} (sd {:.2})", r.mean, r.std_dev));
    }
    within_budget(start.elapsed(), Duration::from_secs(30))?;
    Ok(found.join(", "))
}

fn bit_statistics() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let params = MacParams::default_profile().with_tag_mode(TagMode::ModPow2);
    let key = keygen(&params, 10, &mut rng).map_err(|e| e.to_string())?;
    let tags = 1_000_000usize.div_ceil(params.tag_bits());
    let r = analysis::bit_statistics(&params, &key, tags, &mut rng).map_err(|e| e.to_string())?;
    let s = &r.stream;
    check(s.bits >= 1_000_000, || format!("only {} bits", s.bits))?;
    check(s.monobit_pass, || format!("monobit z = {}", s.monobit_z))?;
    check(s.serial_pass, || format!("serial chi2 = {}", s.serial_chi2))?;
    within_budget(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "{} bits: z = {:.3}, chi2(3) = {:.3}",
        s.bits, s.monobit_z, s.serial_chi2
    ))
}

fn timing_formulas() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut tuples = 0;
    while tuples < 24 {
        let n = rng.gen_range(2..=40);
        let block_bits = 8 * rng.gen_range(1..=4u32);
        let q = next_prime_at_least(1 << block_bits).map_err(|e| e.to_string())?;
        let variant = if tuples % 2 == 0 { Variant::Dmac1 } else { Variant::Dmac2 };
        let params = MacParams::new(256, block_bits, n, q, 8)
            .map_err(|e| e.to_string())?
            .with_variant(variant);
        let blocks: Vec<u64> = (0..rng.gen_range(1..=60))
            .map(|_| rng.gen_range(0..1u64 << block_bits))
            .collect();
        let s = rng.gen_range(0..=params.max_password_len());
        let iv = (0..n).map(|_| rng.gen_range(0..q)).collect();
        let key = MacKey::new(iv, (0..s).map(|_| rng.gen_range(0..256)).collect());
        let r = count_ops_blocks(&blocks, &key, &params).map_err(|e| e.to_string())?;
        let per_step = match variant {
            Variant::Dmac1 => 2 * n + 2,
            Variant::Dmac2 => 3 * n + 2,
        } as u64;
        let expected = per_step * (blocks.len() + s) as u64;
        check(r.measured == expected, || {
            format!("{variant} n={n} N={block_bits} l(M)={} s={s}: {} != {expected}", blocks.len(), r.measured)
        })?;
        tuples += 1;
    }

    // Two-thousand-byte message, 32-bit blocks, n = 64, s = 10.
    let params = MacParams::new(256, 32, 64, 4294967311, 256)
        .map_err(|e| e.to_string())?
        .with_variant(Variant::Dmac1);
    let key = MacKey::new((0..64).collect(), vec![1; 10]);
    let message: Vec<u64> = (0..2000).map(|_| rng.gen_range(0..256)).collect();
    let dirs = block_directions(&message, &params).map_err(|e| e.to_string())?;
    let r = count_ops_blocks(&dirs, &key, &params).map_err(|e| e.to_string())?;
    let measured = r.measured as f64 / (32.0 * 500.0) + 64.0 / 16000.0;
    let formula = 130.0 / 32.0 * (1.0 + 10.0 / 500.0) + 64.0 / (2000.0 * 8.0);
    check((measured - formula).abs() < 1e-3, || format!("{measured} vs {formula}"))?;
    check(dirs.len() == 500, || format!("{} blocks", dirs.len()))?;
    within_budget(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!(
        "{tuples} random tuples exact; 2000-byte example {measured:.5} ops/bit (formula {formula:.5})"
    ))
}

/// Replays two direction sequences and checks that wherever they differ the
/// second is the mirror of the first.
fn mirror_related(params: &MacParams, iv: &Vertex, a: &[u64], b: &[u64]) -> bool {
    let g = params.graph();
    let mut state = WalkState::start(iv.clone());
    for (&x, &y) in a.iter().zip(b) {
        let q = g.modulus().value();
        if x % q != y % q && mirror_direction(g, &state, x) != y % q {
            return false;
        }
        state = walk_step(g, &state, x, params.variant()).expect("valid walk");
    }
    a.len() == b.len()
}

fn collision_oracle() -> Outcome {
    let start = Instant::now();
    let params = MacParams::new(4, 2, 3, 5, 6)
        .map_err(|e| e.to_string())?
        .with_variant(Variant::Dmac1);
    let mut totals = [0usize; 5];
    for a in 0..5 {
        for b in 0..5 {
            for c in 0..5 {
                for password in [vec![], vec![1]] {
                    let key = MacKey::new(vec![a, b, c], password.clone());
                    let r = brute_force_collisions(&params, &key, 2).map_err(|e| e.to_string())?;
                    check(r.structural_below_half_girth() == 0, || {
                        format!("structural collision with IV ({a},{b},{c})")
                    })?;
                    for p in &r.pairs {
                        totals[p.kind as usize] += 1;
                        if p.kind == CollisionKind::Mirror {
                            let mut da = block_directions(&p.first, &params).unwrap();
                            let mut db = block_directions(&p.second, &params).unwrap();
                            da.extend(&password);
                            db.extend(&password);
                            check(mirror_related(&params, key.iv(), &da, &db), || {
                                format!("{:?} / {:?} not mirror related", p.first, p.second)
                            })?;
                        }
                    }
                }
                // Whole-vertex comparison over every direction in F_5.
                let iv = Vertex::point(vec![a, b, c]);
                for steps in 1..=3 {
                    let r = direction_collisions(params.graph(), &iv, steps, Variant::Dmac1)
                        .map_err(|e| e.to_string())?;
                    check(r.count(CollisionKind::Structural) == 0, || {
                        format!("structural walk collision from {iv} in {steps} steps")
                    })?;
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut reproduced = 0;
    for variant in [Variant::Dmac1, Variant::Dmac2] {
        let params = MacParams::default_profile().with_variant(variant);
        let key = keygen(&params, 10, &mut rng).map_err(|e| e.to_string())?;
        let message: Vec<u64> = (0..64).map(|_| rng.gen_range(0..256)).collect();
        let tag = dmac(&message, &key, &params).map_err(|e| e.to_string())?;
        let dirs = block_directions(&message, &params).map_err(|e| e.to_string())?;
        for i in 0..dirs.len() {
            let m = mirror_blocks(&dirs, &key, &params, i).map_err(|e| e.to_string())?;
            check(dmac_blocks(&m, &key, &params).map_err(|e| e.to_string())? == tag, || {
                format!("{variant}: mirrored block {i} changed the tag")
            })?;
            if let Some(mm) = mirror_message(&message, &key, &params, i).map_err(|e| e.to_string())? {
                check(mm != message && dmac(&mm, &key, &params).map_err(|e| e.to_string())? == tag, || {
                    format!("{variant}: mirrored message block {i}")
                })?;
                reproduced += 1;
            }
        }
    }
    check(reproduced > 0, || "no mirror message reproduced".into())?;
    within_budget(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "D(3,5), all 125 IVs: structural 0, mirror {}, backtracking {}, tag-reduction {}, encoding {}; \
         {reproduced} mirror messages at the default profile",
        totals[CollisionKind::Mirror as usize],
        totals[CollisionKind::Backtracking as usize],
        totals[CollisionKind::TagReduction as usize],
        totals[CollisionKind::Encoding as usize],
    ))
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for variant in [Variant::Dmac1, Variant::Dmac2] {
        let params = MacParams::default_profile().with_variant(variant);
        for case in 0..100 {
            let key = keygen(&params, rng.gen_range(1..=18), &mut rng).map_err(|e| e.to_string())?;
            let message: Vec<u64> = (0..rng.gen_range(0..64)).map(|_| rng.gen_range(0..256)).collect();
            let tag = dmac(&message, &key, &params).map_err(|e| e.to_string())?;
            check(verify(&message, &key, &params, &tag).map_err(|e| e.to_string())?, || {
                format!("{variant} case {case}: own tag rejected")
            })?;
            for bit in 0..tag.len_bits() {
                let mut bad = tag.clone();
                bad.flip_bit(bit);
                check(!verify(&message, &key, &params, &bad).map_err(|e| e.to_string())?, || {
                    format!("{variant} case {case}: bit {bit} flip accepted")
                })?;
            }
        }
    }
    within_budget(start.elapsed(), Duration::from_secs(10))?;
    Ok("200 cases, all 256 single-bit corruptions rejected".into())
}

fn throughput() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let params = MacParams::default_profile();
    let key = keygen(&params, 10, &mut rng).map_err(|e| e.to_string())?;
    let mut message = vec![0u8; 4 << 20];
    rng.fill(&mut message[..]);
    let mut best: f64 = 0.0;
    for _ in 0..3 {
        let start = Instant::now();
        let tag = dmac_bytes(&message, &key, &params).map_err(|e| e.to_string())?;
        std::hint::black_box(tag);
        best = best.max(4.0 / start.elapsed().as_secs_f64());
    }
    check(best >= 10.0, || format!("{best:.2} MiB/s"))?;
    Ok(format!("{best:.2} MiB/s (best of 3, 4 MiB, DMAC-2)"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("D(6,11) single-step KAT", example_one_neighbor),
        ("toy DMAC-2 KAT", toy_example),
        ("girth floor", girth_floor),
        ("regularity, bipartiteness, components", structure),
        ("spectral bound", spectral_bound),
        ("avalanche", avalanche),
        ("bit statistics", bit_statistics),
        ("op-count formulas", timing_formulas),
        ("collision oracle", collision_oracle),
        ("round trip", round_trip),
        ("throughput", throughput),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{secs:.3}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} [{secs:.3}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
