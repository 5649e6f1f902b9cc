//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use cayleyci::abgroups::{abelian_types, GroupSpec};
use cayleyci::ci::{babai_ci, centrum_check, dci_scan, BabaiVerdict, Budgets, ScanMode, SetClass, Witness};
use cayleyci::graphs::{CayleyGraph, ColoredDigraph};
use cayleyci::group::{center, sylow, DEFAULT_ENUM_CAP, DEFAULT_NODE_BUDGET};
use cayleyci::pipeline::{
    conjugate_p3q, random_beta, structured_set, szorzas_build, Layout, PipelineBudgets, PipelineError, Szorzas,
};
use cayleyci::two_closure::{closure2, orbitals};
use cayleyci::{Perm, PermGroup};
use cayleyci_cli::commands::witness_valid;
use cayleyci_cli::formats::parse_perm;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

type Check = Result<String, String>;
/// Case name of a certificate, inapplicable label, soundness.
type RunOutcome = (Option<&'static str>, Option<String>, bool);
type Criterion = (&'static str, Duration, fn() -> Check);

fn jobs() -> String {
    std::thread::available_parallelism().map_or(1, |n| n.get()).to_string()
}

fn cli_json(args: &[&str]) -> Result<(i32, Value), String> {
    let mut full = vec!["cayleyci"];
    full.extend_from_slice(args);
    let j = jobs();
    full.extend(["--json", "-", "--jobs", &j]);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cayleyci_cli::run_from(full, &mut out, &mut err);
    let v = serde_json::from_slice(&out).map_err(|e| format!("{e}: {}", String::from_utf8_lossy(&err)))?;
    Ok((code, v))
}

fn scan(group: &str) -> Result<Value, String> {
    let (code, v) = cli_json(&["dci-scan", "--group", group, "--mode", "exhaustive", "--allow-large"])?;
    if code != 0 {
        return Err(format!("dci-scan {group} exited {code}"));
    }
    Ok(v["result"].clone())
}

fn num(v: &Value) -> u64 {
    v.as_u64().unwrap_or(u64::MAX)
}

fn all_ci(group: &str) -> Check {
    let r = scan(group)?;
    let t = &r["totals"];
    if r["all_ci"] == true && num(&t["skipped"]) == 0 {
        Ok(format!("{group}: {} sets all CI", t["sets"]))
    } else {
        Err(format!("{group}: {} non-CI of {}", t["non_ci"], t["sets"]))
    }
}

fn set_of(v: &Value) -> Vec<usize> {
    v.as_array()
        .map_or(vec![], |a| a.iter().map(|x| x.as_u64().unwrap() as usize).collect())
}

fn c1() -> Check {
    let r = scan("Z8")?;
    let spec = GroupSpec::cyclic(8).unwrap();
    let mut verified = 0;
    for w in r["witnesses"].as_array().into_iter().flatten() {
        let s = set_of(&w["s"]);
        let t = set_of(&w["t"]);
        let sigma = parse_perm(w["sigma"].as_str().unwrap_or(""), 8).map_err(|e| e.to_string())?;
        if !witness_valid(&spec, &s, &Witness { t, sigma }, DEFAULT_ENUM_CAP).map_err(|e| e.to_string())? {
            return Err(format!("witness for {s:?} fails re-validation"));
        }
        verified += 1;
    }
    if verified == 0 {
        return Err("no non-CI set found".into());
    }
    Ok(format!(
        "{} sets, {verified} non-CI with verified witnesses",
        r["totals"]["sets"]
    ))
}

fn c2() -> Check {
    let mut notes = Vec::new();
    for p in ["Z2", "Z3", "Z5", "Z7"] {
        notes.push(all_ci(p)?);
    }
    Ok(notes.join("; "))
}

fn c3() -> Check {
    let a = all_ci("Z4")?;
    let b = all_ci("Z6")?;
    let r = scan("Z9")?;
    let non = num(&r["totals"]["non_ci"]);
    let sym = &r["symmetric"];
    if non == 0 {
        return Err("Z9 scan found no non-CI set".into());
    }
    if num(&sym["ci"]) != num(&sym["sets"]) {
        return Err(format!(
            "Z9: {} symmetric sets not CI",
            num(&sym["sets"]) - num(&sym["ci"])
        ));
    }
    Ok(format!(
        "{a}; {b}; Z9: {non} non-CI, all {} symmetric sets CI",
        sym["sets"]
    ))
}

fn c4() -> Check {
    all_ci("Z15")
}

fn c5() -> Check {
    let budgets = Budgets::default();
    let mut total = 0;
    for n in [8, 9] {
        let spec = GroupSpec::cyclic(n).unwrap();
        let report = dci_scan(&spec, ScanMode::Exhaustive, false, &budgets).map_err(|e| e.to_string())?;
        let verdicts: Vec<_> = report
            .entries
            .par_iter()
            .map(|e| babai_ci(&spec, &e.set, &budgets).map(|b| (e.set.clone(), e.class, b.verdict)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for (set, class, v) in verdicts {
            let agree = matches!(
                (class, v),
                (SetClass::Ci, BabaiVerdict::Ci) | (SetClass::NonCi, BabaiVerdict::NotCi)
            );
            if !agree {
                return Err(format!("Z{n} {set:?}: scan {class:?}, babai {v:?}"));
            }
            total += 1;
        }
    }
    Ok(format!(
        "{total} sets of Z8 and Z9, zero disagreements, zero indeterminate"
    ))
}

fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn rec(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Perm>) {
        if k == cur.len() {
            out.push(Perm::from_images(cur.clone()).unwrap());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

fn random_perm<R: Rng>(n: usize, rng: &mut R) -> Perm {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Perm::from_images(v).unwrap()
}

fn c6() -> Check {
    let e = |e: cayleyci::Error| e.to_string();
    // closure of the regular Z5 against every element of Sym(5)
    let z5 = GroupSpec::cyclic(5).unwrap().regular_rep();
    let col = orbitals(&z5).graph;
    let keep: Vec<Perm> = all_perms(5).into_iter().filter(|p| col.is_automorphism(p)).collect();
    let brute = PermGroup::new(5, keep.clone()).map_err(e)?;
    let cl = closure2(&z5, DEFAULT_NODE_BUDGET).map_err(e)?;
    if keep.len() != 5 || !brute.same_group(&z5) || !cl.same_group(&brute) {
        return Err(format!("closure of Z5 has {} elements by brute force", keep.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let specs: Vec<GroupSpec> = (2..=12).flat_map(abelian_types).collect();
    for trial in 0..100 {
        let spec = specs.choose(&mut rng).unwrap();
        let set: Vec<usize> = (1..spec.order()).filter(|_| rng.gen_bool(0.4)).collect();
        let gamma = CayleyGraph::new(spec, &set).map_err(e)?;
        let aut = gamma.automorphisms(DEFAULT_NODE_BUDGET).map_err(e)?;
        let gens: Vec<Perm> = (0..rng.gen_range(1..=2))
            .map(|_| aut.random_element(&mut rng))
            .collect();
        let g = PermGroup::new(spec.order(), gens).map_err(e)?;
        let c = closure2(&g, DEFAULT_NODE_BUDGET).map_err(e)?;
        if !c.generators().iter().all(|x| gamma.graph().is_automorphism(x)) || !g.is_subgroup_of(&c) {
            return Err(format!("trial {trial}: closure leaves Aut of Cay({spec:?}, {set:?})"));
        }
    }
    let mut checked = 0;
    for n in 1..=10 {
        for _ in 0..6 {
            let gens: Vec<Perm> = (0..rng.gen_range(1..=2))
                .map(|_| {
                    // sparse generators keep many groups intransitive and small
                    let mut p = Perm::identity(n);
                    for _ in 0..rng.gen_range(1..=2) {
                        let k = rng.gen_range(1..=n);
                        let pts: Vec<usize> = (0..n)
                            .collect::<Vec<_>>()
                            .choose_multiple(&mut rng, k)
                            .copied()
                            .collect();
                        p = p.then(&Perm::from_cycles(n, &[pts]).unwrap());
                    }
                    p
                })
                .collect();
            let g = PermGroup::new(n, gens).map_err(e)?;
            let c1 = closure2(&g, DEFAULT_NODE_BUDGET).map_err(e)?;
            let c2 = closure2(&c1, DEFAULT_NODE_BUDGET).map_err(e)?;
            if !c1.same_group(&c2) || orbitals(&c1).graph != orbitals(&g).graph {
                return Err(format!("closure not idempotent on degree {n}"));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "Z5 closed (brute force over 120); 100 Cayley graphs; {checked} groups idempotent"
    ))
}

fn c7() -> Check {
    let e = |e: cayleyci::Error| e.to_string();
    let p4 = sylow(&PermGroup::symmetric(4), 2, DEFAULT_ENUM_CAP).map_err(e)?;
    let r4 = centrum_check(&p4, DEFAULT_ENUM_CAP, DEFAULT_NODE_BUDGET).map_err(e)?;
    if !r4.failures.is_empty() || r4.checked == 0 {
        return Err(format!("degree 4: {} of {} fail", r4.failures.len(), r4.checked));
    }
    let p8 = sylow(&PermGroup::symmetric(8), 2, DEFAULT_ENUM_CAP).map_err(e)?;
    let z = center(&p8, DEFAULT_ENUM_CAP).map_err(e)?;
    let all8 = centrum_check(&p8, DEFAULT_ENUM_CAP, DEFAULT_NODE_BUDGET).map_err(e)?;
    if !all8.failures.is_empty() {
        return Err(format!("degree 8 enumeration: {} failures", all8.failures.len()));
    }
    // random abelian subgroups of P generated by commuting random elements
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let elems = p8.enumerate(DEFAULT_ENUM_CAP).map_err(e)?;
    let (mut trials, mut attempts) = (0, 0);
    while trials < 200 {
        attempts += 1;
        if attempts > 1_000_000 {
            return Err(format!("only {trials} regular abelian subgroups sampled"));
        }
        let mut gens: Vec<Perm> = Vec::new();
        for _ in 0..3 {
            let pool: Vec<&Perm> = elems
                .iter()
                .filter(|x| gens.iter().all(|g| g.commutes_with(x)))
                .collect();
            gens.push((*pool.choose(&mut rng).unwrap()).clone());
        }
        let h = PermGroup::new(8, gens).map_err(e)?;
        let r = h.regularity_report();
        if !(r.regular && r.abelian) {
            continue;
        }
        trials += 1;
        if !z.is_subgroup_of(&h) {
            return Err(format!("trial {trials}: regular abelian subgroup misses Z(P)"));
        }
    }
    Ok(format!(
        "degree 4: {} subgroups; degree 8: {} enumerated, {trials} random trials ({attempts} draws)",
        r4.checked, all8.checked
    ))
}

fn shift_perm(q: usize, blocks: usize, f: impl Fn(usize, usize) -> (usize, usize)) -> Perm {
    Perm::from_images(
        (0..blocks * q)
            .map(|v| {
                let (b, x) = f(v / q, v % q);
                b * q + x
            })
            .collect(),
    )
    .unwrap()
}

/// Blocks `A = 0..q`, `B = q..2q`; the ring generator has multiplier `d` on `B`.
fn szorzas_case(q: usize, d: usize, b0: usize, b0p: usize) -> Result<(), String> {
    let a: Vec<usize> = (0..q).collect();
    let b: Vec<usize> = (q..2 * q).collect();
    let g_hat = shift_perm(q, 2, |blk, x| (blk, (x + 1) % q));
    let g_ring = shift_perm(q, 2, |blk, x| (blk, if blk == 0 { (x + 1) % q } else { (x + d) % q }));
    let w_hat = shift_perm(q, 2, |blk, x| {
        if blk == 0 {
            (1, (b0 + x) % q)
        } else {
            (0, (x + q - b0) % q)
        }
    });
    let di = (1..q).find(|k| k * d % q == 1).unwrap();
    let w_ring = shift_perm(q, 2, |blk, x| {
        if blk == 0 {
            (1, (b0p + d * x) % q)
        } else {
            (0, (x + q - b0p) * di % q)
        }
    });
    let alpha = szorzas_build(&Szorzas::A { w_hat, w_ring }, &a, &b, &g_hat, &g_ring)
        .map_err(|e| format!("q={q} d={d} b0={b0} b0'={b0p}: {e}"))?;
    let conj = g_ring.conjugate_by(&alpha);
    for &x in &b {
        if conj.apply(x) != g_hat.apply(x) {
            return Err(format!("q={q} d={d} b0={b0} b0'={b0p}: mismatch at {x}"));
        }
    }
    Ok(())
}

fn c8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cases = 0;
    for q in [3usize, 5, 7, 11] {
        for d in 1..q {
            if q <= 5 {
                for b0 in 0..q {
                    for b0p in 0..q {
                        szorzas_case(q, d, b0, b0p)?;
                        cases += 1;
                    }
                }
            } else {
                for _ in 0..100 {
                    szorzas_case(q, d, rng.gen_range(0..q), rng.gen_range(0..q))?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} cases exact on B"))
}

fn c9() -> Check {
    let spec = GroupSpec::p3q(2, 11).unwrap();
    let layout = Layout::new(&spec).map_err(|e| e.to_string())?;
    let hat = spec.regular_rep();
    let runs: Vec<Result<RunOutcome, String>> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (set, _, _) = structured_set(&layout, &mut rng);
            let gamma = CayleyGraph::new(&spec, &set).map_err(|e| e.to_string())?;
            let (beta, _) = random_beta(&gamma, &mut rng, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
            let ring = hat.conjugate_by(&beta);
            match conjugate_p3q(&gamma, &ring, PipelineBudgets::default()) {
                Ok(cert) => {
                    let sound = gamma.graph().is_automorphism(&cert.alpha)
                        && ring.conjugate_by(&cert.alpha).same_group(&hat)
                        && cert.verify(&gamma, &ring);
                    Ok((Some(cert.case.name()), None, sound))
                }
                Err(PipelineError::Inapplicable(r)) => Ok((None, Some(r.label()), true)),
                Err(e) => Err(format!("seed {seed}: {e}")),
            }
        })
        .collect();
    let mut certs = 0;
    let mut reasons: BTreeMap<String, usize> = BTreeMap::new();
    let mut cases: BTreeMap<&str, usize> = BTreeMap::new();
    for r in runs {
        let (case, reason, sound) = r?;
        if !sound {
            return Err("an issued certificate failed re-validation".into());
        }
        if let Some(c) = case {
            certs += 1;
            *cases.entry(c).or_default() += 1;
        }
        if let Some(l) = reason {
            *reasons.entry(l).or_default() += 1;
        }
    }
    Ok(format!(
        "soundness {certs}/{certs}; completeness {certs}/100; cases {cases:?}; inapplicable {reasons:?}"
    ))
}

fn random_digraph<R: Rng>(n: usize, k: u32, rng: &mut R) -> ColoredDigraph {
    let vertex_colors = rng.gen_range(1..=2);
    ColoredDigraph::from_fn(n, |u, v| {
        if u == v {
            rng.gen_range(0..vertex_colors)
        } else {
            vertex_colors + rng.gen_range(0..k)
        }
    })
}

fn c10() -> Check {
    let e = |e: cayleyci::Error| e.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut small = 0;
    let mut iso_pairs = 0;
    for i in 0..200 {
        let n = rng.gen_range(1..=12);
        let k = rng.gen_range(1..=3);
        let g = random_digraph(n, k, &mut rng);
        let c = g.canonical(DEFAULT_NODE_BUDGET).map_err(e)?;
        for _ in 0..3 {
            let h = g.relabel(&random_perm(n, &mut rng));
            if h.canonical(DEFAULT_NODE_BUDGET).map_err(e)?.form != c.form {
                return Err(format!("graph {i} (n={n}): relabelling changes the form"));
            }
        }
        if n <= 7 {
            // partner: a relabelling, half the time with one pair recolored
            let mut partner = g.relabel(&random_perm(n, &mut rng));
            if n > 1 && rng.gen_bool(0.5) {
                let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let colors: Vec<u32> = (0..n * n)
                    .map(|x| {
                        if x == u * n + v && u != v {
                            partner.colors()[x] ^ 1
                        } else {
                            partner.colors()[x]
                        }
                    })
                    .collect();
                partner = ColoredDigraph::new(n, colors).map_err(e)?;
            }
            let brute = all_perms(n).iter().any(|p| g.is_isomorphism(&partner, p));
            let canon = partner.canonical(DEFAULT_NODE_BUDGET).map_err(e)?.form == c.form;
            if brute != canon {
                return Err(format!("graph {i} (n={n}): brute force {brute}, canonical {canon}"));
            }
            small += 1;
            iso_pairs += usize::from(brute);
        }
    }
    Ok(format!(
        "200 graphs relabel-invariant; {small} pairs with n <= 7 agree with brute force ({iso_pairs} isomorphic)"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 Z8 non-CI reproduction", Duration::from_secs(60), c1),
        ("2 Z_p all CI, p in {2,3,5,7}", Duration::from_secs(300), c2),
        (
            "3 Z4, Z6 all CI; Z9 non-CI only for directed sets",
            Duration::from_secs(600),
            c3,
        ),
        ("4 Z15 all CI", Duration::from_secs(1800), c4),
        ("5 babai agrees with scan on Z8, Z9", Duration::from_secs(600), c5),
        ("6 2-closure properties", Duration::from_secs(600), c6),
        (
            "7 centre of a Sylow 2-subgroup in regular abelian subgroups",
            Duration::from_secs(600),
            c7,
        ),
        ("8 szorzas micro-suite", Duration::from_secs(600), c8),
        ("9 pipeline on Z2^3xZ11, 100 runs", Duration::from_secs(1800), c9),
        ("10 canonical forms", Duration::from_secs(600), c10),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; took {took:.1?}, limit {limit:?}")),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "[{}] {name} ({:.1}s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
