//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p lh-core --release --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lh_core::bisection::{
    bisection_direct, bisection_fwht, brute_force_bisection, cut_spectrum, cut_value,
    optimize_direct, PartitionVector,
};
use lh_core::compare::{alternative_series, attach_lh_ratio, lh_series, ComparisonRow, Family};
use lh_core::constructions::{augment_odd_b, b3_augment_len, lh_hd, low_density_b3, HdParams};
use lh_core::db::SolutionsDb;
use lh_core::designer::{find_solution, Rational, Requirement, WiringTable};
use lh_core::ecc::{apply_equivalence, code_to_lh, diagonalize, verify_duality, CodeMatrix, EquivalenceMap};
use lh_core::walsh::{fwht_in_place, walsh_algebraic};
use lh_core::GeneratorSet;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> Result<T, String> {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    check(took < limit, || format!("{what} took {took:?} (limit {limit:?})"))?;
    Ok(out)
}

fn set(d: u32, hops: &[u32]) -> GeneratorSet {
    GeneratorSet::new(d, hops.to_vec()).unwrap()
}

fn random_spanning(rng: &mut ChaCha8Rng, d: u32, max_m: usize) -> GeneratorSet {
    let n = 1u32 << d;
    loop {
        let m = rng.gen_range(d as usize..=max_m.min(n as usize - 1));
        let mut pool: Vec<u32> = (1..n).collect();
        for i in 0..m {
            let j = rng.gen_range(i..pool.len());
            pool.swap(i, j);
        }
        let s = set(d, &pool[..m]);
        if s.span_check() {
            return s;
        }
    }
}

fn criterion_1() -> Outcome {
    let limit = Duration::from_secs(1);
    let fq3 = set(3, &[1, 2, 4, 7]);
    let r = timed(limit, "FQ3", || bisection_fwht(&fq3).unwrap())?;
    check((r.b, r.links) == (2, 8), || format!("FQ3 b={} B={}", r.b, r.links))?;

    let fq4 = set(4, &[1, 2, 4, 8, 0xF]);
    let (r, cut) = timed(limit, "FQ4", || {
        let block = PartitionVector::new([[1i8; 8], [-1i8; 8]].concat()).unwrap();
        (bisection_fwht(&fq4).unwrap(), cut_value(&fq4, &block).unwrap())
    })?;
    check(r.links == 16 && cut == 16, || format!("FQ4 B={} block cut={cut}", r.links))?;

    let code = CodeMatrix::parse("1101000\n0110100\n1110010\n1010001\n").unwrap();
    let (h, r, dual) = timed(limit, "[7,4,3] translation", || {
        let h = code_to_lh(&code).unwrap();
        let r = bisection_fwht(&h).unwrap();
        (h, r, verify_duality(&code).unwrap())
    })?;
    check(h.hops() == [1, 2, 4, 8, 7, 0xE, 0xB], || format!("translation {h}"))?;
    check((r.b, r.links, dual) == (3, 24, true), || {
        format!("[7,4,3] b={} B={} duality={dual}", r.b, r.links)
    })?;

    let aug = timed(limit, "augmentation", || augment_odd_b(&h).unwrap())?;
    let b = bisection_fwht(&aug).unwrap().b;
    check(aug.hops().last() == Some(&0xD) && b == 4, || {
        format!("augmented {aug} b={b}")
    })?;
    Ok("FQ3 b=2 B=8; FQ4 B=16, block cut 16; [7,4,3] -> {1,2,4,8,7,E,B} b=3 B=24 dual; +D -> b=4".into())
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    for i in 0..100 {
        let d = if i % 2 == 0 { 3 } else { 4 };
        let s = random_spanning(&mut rng, d, 10);
        let direct = bisection_direct(&s).unwrap();
        let fast = bisection_fwht(&s).unwrap();
        let brute = brute_force_bisection(&s).unwrap();
        check(direct == fast && brute == fast.links, || {
            format!("{s}: direct {} fwht {} brute {brute}", direct.links, fast.links)
        })?;
    }
    let took = start.elapsed();
    check(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!("100 random sets (d=3,4) agree across direct/fwht/brute in {took:.2?}"))
}

const EXAMPLE_1_ROW_5: &str = "5:\t04\t07\t01\t0D\t15\t0B\t0A\t11\t1C\t**\t**\t**";

const EXAMPLE_2_ROWS: [&str; 16] = [
    "0:\t01\t02\t04\t08\t10\t20\t40\t80\t1A\t2D\t47\t78\t7E\t8E\t9D\tB2\tD1\tFB",
    "1:\t00\t03\t05\t09\t11\t21\t41\t81\t1B\t2C\t46\t79\t7F\t8F\t9C\tB3\tD0\tFA",
    "2:\t03\t00\t06\t0A\t12\t22\t42\t82\t18\t2F\t45\t7A\t7C\t8C\t9F\tB0\tD3\tF9",
    "3:\t02\t01\t07\t0B\t13\t23\t43\t83\t19\t2E\t44\t7B\t7D\t8D\t9E\tB1\tD2\tF8",
    "4:\t05\t06\t00\t0C\t14\t24\t44\t84\t1E\t29\t43\t7C\t7A\t8A\t99\tB6\tD5\tFF",
    "5:\t04\t07\t01\t0D\t15\t25\t45\t85\t1F\t28\t42\t7D\t7B\t8B\t98\tB7\tD4\tFE",
    "6:\t07\t04\t02\t0E\t16\t26\t46\t86\t1C\t2B\t41\t7E\t78\t88\t9B\tB4\tD7\tFD",
    "7:\t06\t05\t03\t0F\t17\t27\t47\t87\t1D\t2A\t40\t7F\t79\t89\t9A\tB5\tD6\tFC",
    "8:\t09\t0A\t0C\t00\t18\t28\t48\t88\t12\t25\t4F\t70\t76\t86\t95\tBA\tD9\tF3",
    "9:\t08\t0B\t0D\t01\t19\t29\t49\t89\t13\t24\t4E\t71\t77\t87\t94\tBB\tD8\tF2",
    "A:\t0B\t08\t0E\t02\t1A\t2A\t4A\t8A\t10\t27\t4D\t72\t74\t84\t97\tB8\tDB\tF1",
    "B:\t0A\t09\t0F\t03\t1B\t2B\t4B\t8B\t11\t26\t4C\t73\t75\t85\t96\tB9\tDA\tF0",
    "C:\t0D\t0E\t08\t04\t1C\t2C\t4C\t8C\t16\t21\t4B\t74\t72\t82\t91\tBE\tDD\tF7",
    "D:\t0C\t0F\t09\t05\t1D\t2D\t4D\t8D\t17\t20\t4A\t75\t73\t83\t90\tBF\tDC\tF6",
    "E:\t0F\t0C\t0A\t06\t1E\t2E\t4E\t8E\t14\t23\t49\t76\t70\t80\t93\tBC\tDF\tF5",
    "F:\t0E\t0D\t0B\t07\t1F\t2F\t4F\t8F\t15\t22\t48\t77\t71\t81\t92\tBD\tDE\tF4",
];

fn criterion_3() -> Outcome {
    let db = SolutionsDb::seeded().unwrap();
    let one = Rational::from_integer(1);

    let hit = find_solution(&db, &Requirement::new(96, 12, one).unwrap()).unwrap();
    let rec = &hit.record;
    check(
        (rec.d(), rec.m(), rec.b(), rec.diameter()) == (5, 9, 3, 3),
        || format!("ex1 matched d={} m={} b={} diam={}", rec.d(), rec.m(), rec.b(), rec.diameter()),
    )?;
    let avg = rec.avg_hops();
    check((avg.total, avg.nodes) == (54, 32) && avg.decimal() == "1.6875", || {
        format!("ex1 avg {avg}")
    })?;
    let row5 = WiringTable::for_record(rec, 12).unwrap().row(5).unwrap();
    check(row5 == EXAMPLE_1_ROW_5, || format!("ex1 row 5 = {row5:?}"))?;

    let hit = find_solution(&db, &Requirement::new(1536, 24, one).unwrap()).unwrap();
    let rec = &hit.record;
    check(
        (rec.d(), rec.m(), rec.b(), rec.diameter()) == (8, 18, 6, 3),
        || format!("ex2 matched d={} m={} b={} diam={}", rec.d(), rec.m(), rec.b(), rec.diameter()),
    )?;
    let avg = rec.avg_hops();
    check(
        (avg.total, avg.nodes) == (585, 256) && (avg.as_f64() - 2.2851562).abs() <= 5e-7,
        || format!("ex2 avg {avg}"),
    )?;
    let table = WiringTable::for_record(rec, 24).unwrap();
    for (v, want) in EXAMPLE_2_ROWS.iter().enumerate() {
        let row = table.row(v as u32).unwrap();
        let got: Vec<&str> = row.split('\t').take(19).collect();
        check(got.join("\t") == *want, || format!("ex2 row {v:X}: {row:?}"))?;
    }

    let hit = find_solution(&db, &Requirement::new(655_360, 48, one).unwrap()).unwrap();
    let rec = &hit.record;
    check((rec.d(), rec.m(), rec.b()) == (16, 38, 10), || {
        format!("ex3 matched d={} m={} b={}", rec.d(), rec.m(), rec.b())
    })?;
    let profile = timed(Duration::from_secs(10), "ex3 metrics", || {
        rec.generators().distance_profile().unwrap()
    })?;
    let avg = profile.avg_hops();
    check(
        profile.diameter() == 5 && (avg.as_f64() - 4.061691).abs() <= 5e-7,
        || format!("ex3 diam={} avg={avg}", profile.diameter()),
    )?;
    Ok(format!(
        "ex1 d5 m9 b3 diam3 avg 54/32, row 5 exact; ex2 d8 m18 b6 diam3 avg 585/256, rows 0-F exact; \
         ex3 d16 m38 b10 diam5 avg {avg} = {}",
        avg.decimal()
    ))
}

fn criterion_4() -> Outcome {
    let mut rungs = 0;
    let mut b_ok = 0;
    let mut diam_ok = 0;
    let mut stated_avg_ok = 0;
    let mut measured_avg_form = 0;
    for d in 1..=8u32 {
        let n = 1u64 << d;
        for m in HdParams::ladder(d) {
            let p = HdParams::new(d, m).unwrap();
            let s = lh_hd(p, false).unwrap();
            let b = bisection_fwht(&s).unwrap().b;
            let prof = s.distance_profile().unwrap();
            let avg = prof.avg_hops();
            rungs += 1;
            b_ok += usize::from(b == p.expected_bisection());
            diam_ok += usize::from(prof.diameter() == 2);
            // avg == 2 - m/n  <=>  total * n == (2n - m) * nodes
            stated_avg_ok += usize::from(
                u128::from(avg.total) * u128::from(n) == u128::from(2 * n - m as u64) * u128::from(avg.nodes),
            );
            measured_avg_form += usize::from(avg == p.expected_avg_hops());
        }
    }
    let mut b3_ok = true;
    for d in 3..=12u32 {
        let s = low_density_b3(d, None).unwrap();
        let l = b3_augment_len(d).unwrap();
        let want_l = match d {
            3..=4 => 3,
            5..=11 => 4,
            _ => 5,
        };
        b3_ok &= bisection_fwht(&s).unwrap().b == 3 && l == want_l && s.m() == (d + l) as usize;
    }
    let summary = format!(
        "LH-HD d<=8: b=floor((m+1)/2) on {b_ok}/{rungs} rungs; diameter 2 on {diam_ok}/{rungs}; \
         avg=2-m/n on {stated_avg_ok}/{rungs}; measured avg=2-(m+2)/n on {measured_avg_form}/{rungs}; \
         b=3 family d=3..12 {}",
        if b3_ok { "ok" } else { "FAILED" }
    );
    if b_ok == rungs && diam_ok == rungs && stated_avg_ok == rungs && b3_ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn test_sets(rng: &mut ChaCha8Rng) -> Vec<GeneratorSet> {
    let mut sets = vec![
        set(3, &[1, 2, 4, 7]),
        set(4, &[1, 2, 4, 8, 7, 0xE, 0xB]),
        set(5, &[1, 2, 4, 8, 0x10, 0xE, 0xF, 0x14, 0x19]),
        lh_hd(HdParams::new(6, 32).unwrap(), false).unwrap(),
        low_density_b3(6, None).unwrap(),
    ];
    for d in 3..=6 {
        sets.push(random_spanning(rng, d, 12));
    }
    sets
}

fn signature(s: &GeneratorSet) -> (u32, Vec<u32>, Vec<u64>) {
    let mut cuts = cut_spectrum(s);
    cuts.sort_unstable();
    (
        bisection_fwht(s).unwrap().b,
        cuts,
        s.distance_profile().unwrap().histogram(),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sets = test_sets(&mut rng);
    for s in &sets {
        let want = signature(s);
        let diag = diagonalize(s).unwrap().set;
        check(signature(&diag) == want, || format!("diagonalize changed {s}"))?;
        for _ in 0..50 {
            let map = EquivalenceMap::random(s.dim(), &mut rng);
            let t = apply_equivalence(s, &map).unwrap();
            check(signature(&t) == want, || format!("map {:?} changed {s}", map.images()))?;
        }
    }
    Ok(format!("{} sets x 50 maps + diagonalize: b, cut multiset, distance histogram unchanged", sets.len()))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for d in 0..=8u32 {
        let n = 1u32 << d;
        for j in 0..n {
            let row_j: Vec<i32> = (0..n).map(|x| walsh_algebraic(j, x)).collect();
            if j != 0 {
                check(row_j.iter().sum::<i32>() == 0, || format!("balance n={n} k={j}"))?;
            }
            for k in 0..n {
                let mut dot = 0i64;
                for x in 0..n {
                    let uk = walsh_algebraic(k, x);
                    check(row_j[x as usize] * uk == walsh_algebraic(j ^ k, x), || {
                        format!("xor closure n={n} j={j} k={k} x={x}")
                    })?;
                    dot += i64::from(row_j[x as usize] * uk);
                }
                let want = if j == k { i64::from(n) } else { 0 };
                check(dot == want, || format!("orthogonality n={n} j={j} k={k}"))?;
            }
        }
        let f: Vec<i64> = (0..n).map(|_| rng.gen_range(-50..=50)).collect();
        let naive: Vec<i64> = (0..n)
            .map(|k| (0..n).map(|x| i64::from(walsh_algebraic(k, x)) * f[x as usize]).sum())
            .collect();
        let mut fast = f.clone();
        fwht_in_place(&mut fast).unwrap();
        check(fast == naive, || format!("fwht vs naive n={n}"))?;
    }
    for d in 0..=12u32 {
        let n = 1usize << d;
        let f: Vec<i64> = (0..n).map(|_| rng.gen_range(-1000..=1000)).collect();
        let mut v = f.clone();
        fwht_in_place(&mut v).unwrap();
        fwht_in_place(&mut v).unwrap();
        check(v.iter().zip(&f).all(|(a, b)| *a == b * n as i64), || {
            format!("involution n={n}")
        })?;
    }
    Ok("orthogonality, xor closure, balance, fwht=naive for n<=256; involution for n<=4096".into())
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        let d = 1 + i % 6;
        let s = random_spanning(&mut rng, d, 20);
        let a = s.adjacency().unwrap();
        let lambda = s.eigenvalues();
        let n = s.n() as u32;
        for k in 0..n {
            let u: Vec<i64> = (0..n).map(|x| i64::from(walsh_algebraic(k, x))).collect();
            let au = a.mul_vec(&u);
            check(
                au.iter().zip(&u).all(|(l, r)| *l == lambda[k as usize] * r),
                || format!("{s}: A U_{k} != lambda U_{k}"),
            )?;
        }
    }
    Ok("A U_k = lambda_k U_k componentwise for 20 random sets, n<=64".into())
}

fn criterion_8() -> Outcome {
    let (s, r) = optimize_direct(3, 4, u64::MAX).unwrap();
    check(r.b == 2, || format!("optimize_direct(3,4) -> {s} b={}", r.b))?;
    Ok(format!("optimize_direct(3,4) -> {s} b=2"))
}

fn criterion_9() -> Outcome {
    let db = SolutionsDb::seeded().unwrap();
    let mut rows: Vec<ComparisonRow> = Vec::new();
    for radix in [16u32, 24, 32, 48, 64] {
        let recs: Vec<_> = db.iter().filter(|r| (r.m() as u32) < radix).collect();
        rows.extend(lh_series(recs, radix).unwrap());
        for (family, sizes) in [
            (Family::Hypercube, 3..=12),
            (Family::FoldedCube, 3..=12),
            (Family::FlattenedButterfly, 1..=4),
            (Family::FatTree, 2..=4),
        ] {
            rows.extend(alternative_series(family, radix, sizes).unwrap());
        }
        rows.extend(alternative_series(Family::Dragonfly, radix, 1..=(radix + 1) / 4).unwrap());
    }
    let bad = rows.iter().filter(|r| !r.identity_holds()).count();
    check(bad == 0, || format!("{bad} rows break the cables/port identity"))?;

    let radix = 64;
    let mut cube = alternative_series(Family::Hypercube, radix, 8..=16).unwrap();
    attach_lh_ratio(&mut cube, &db).unwrap();
    let ratios: Vec<Rational> = cube.iter().map(|r| r.ratio_vs_lh.unwrap()).collect();
    check(ratios.windows(2).all(|w| w[0] <= w[1]), || {
        format!("LH/hypercube ratios not monotone: {ratios:?}")
    })?;
    check(ratios.iter().all(|r| *r >= Rational::from_integer(1)), || {
        format!("LH/hypercube ratio below 1: {ratios:?}")
    })?;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r}")).collect();
    Ok(format!(
        "identity holds on {} rows; LH/hypercube ports-per-switch at R=64, d=8..16: {}",
        rows.len(),
        shown.join(" ")
    ))
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = Vec::new();
    for (id, run) in criteria {
        match run() {
            Ok(msg) => println!("PASS criterion {id}: {msg}"),
            Err(msg) => {
                println!("FAIL criterion {id}: {msg}");
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
