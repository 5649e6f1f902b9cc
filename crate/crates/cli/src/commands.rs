//! Command implementations. Each returns an [`Outcome`]; search budgets that
//! run out become exit code 2 rather than errors.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use cayleyci::abgroups::{aut_group, GroupSpec};
use cayleyci::ci::{
    babai_ci, babai_entry, canonical_of_mask, ci_pair, exhaustive_size, sample_sets, BabaiVerdict, Budgets, CiVerdict,
    DciReport, ScanAccumulator, ScanMode, SetClass, Witness,
};
use cayleyci::graphs::{CayleyGraph, ColoredDigraph};
use cayleyci::pipeline::{conjugate_p3q, random_beta, BetaSource, PipelineBudgets, PipelineError};
use cayleyci::two_closure::{closure2, orbitals};
use cayleyci::{Error, Perm, PermGroup};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::formats::{self, format_group, format_set, DigraphJson};
use crate::report::{Outcome, EXIT_INDETERMINATE, EXIT_VERDICT};
use crate::{Command, Common, GraphInput, ScanModeArg};

/// Witnesses listed in the text summary.
const TEXT_WITNESSES: usize = 5;

fn meta(cmd: &Command) -> (&'static str, Option<&str>) {
    match cmd {
        Command::Aut { input } => ("aut", input.group.as_deref()),
        Command::Canon { input, .. } => ("canon", input.group.as_deref()),
        Command::CiPair { group, .. } => ("ci-pair", Some(group)),
        Command::DciScan { group, .. } => ("dci-scan", Some(group)),
        Command::Babai { group, .. } => ("babai", Some(group)),
        Command::TwoClosure { .. } => ("two-closure", None),
        Command::ConjugateP3q { group, .. } => ("conjugate-p3q", Some(group)),
    }
}

fn is_budget(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(
            c.downcast_ref::<Error>(),
            Some(Error::BudgetExceeded { .. } | Error::OverCap { .. })
        )
    })
}

pub fn execute(cmd: &Command, common: &Common) -> Result<Outcome> {
    let (name, group) = meta(cmd);
    let group = match group {
        Some(g) => Some(format_group(&formats::parse_group(g)?)),
        None => None,
    };
    let outcome = |text: String, result: Value, exit: i32| Outcome {
        command: name,
        group: group.clone(),
        text,
        result,
        exit,
    };
    let run = match cmd {
        Command::Aut { input } => aut(input, common),
        Command::Canon { input, out } => canon(input, out.as_deref(), common),
        Command::CiPair { group, s, t } => pair(group, s, t, common),
        Command::DciScan {
            group,
            mode,
            samples,
            allow_large,
            list_sets,
        } => dci_scan(group, *mode, *samples, *allow_large, *list_sets, common),
        Command::Babai { group, s } => babai(group, s, common),
        Command::TwoClosure { gens, gen, degree, out } => {
            two_closure(gens.as_deref(), gen, *degree, out.as_deref(), common)
        }
        Command::ConjugateP3q {
            group,
            s,
            gring_from_beta,
            gring,
        } => conjugate(group, s, gring_from_beta.as_deref(), gring.as_deref(), common),
    };
    match run {
        Ok((text, result, exit)) => Ok(outcome(text, result, exit)),
        Err(e) if is_budget(&e) => {
            let reason = format!("{e:#}");
            Ok(outcome(
                format!("indeterminate: {reason}\n"),
                json!({ "reason": reason }),
                EXIT_INDETERMINATE,
            ))
        }
        Err(e) => Err(e),
    }
}

type Res = Result<(String, Value, i32)>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn budgets(common: &Common) -> Budgets {
    Budgets {
        nodes: common.nodes,
        enum_cap: common.enum_cap,
        subgroup_nodes: common.subgroup_nodes,
    }
}

fn pool(common: &Common) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs.max(1))
        .build()
        .map_err(|e| anyhow!("thread pool: {e}"))
}

fn group_and_set(group: &str, s: &str) -> Result<(GroupSpec, Vec<usize>)> {
    let spec = formats::parse_group(group)?;
    let set = formats::parse_set(s, &spec).context("--s")?;
    Ok((spec, set))
}

fn load_graph(input: &GraphInput) -> Result<ColoredDigraph> {
    match (&input.group, &input.s, &input.graph) {
        (Some(g), Some(s), None) => {
            let (spec, set) = group_and_set(g, s)?;
            Ok(CayleyGraph::new(&spec, &set)?.graph().clone())
        }
        (None, None, Some(path)) => formats::parse_digraph(&read(path)?),
        _ => bail!("give either --group with --s, or --graph"),
    }
}

fn cycles(perms: &[Perm]) -> Vec<String> {
    perms.iter().map(Perm::to_string).collect()
}

fn aut(input: &GraphInput, common: &Common) -> Res {
    let g = load_graph(input)?;
    let out = g.analyse(common.nodes)?;
    let group = PermGroup::with_order(g.n(), out.generators.clone(), &out.order)?;
    let orbits = group.orbits().len();
    let mut text = format!("order {}\norbits {orbits}\n", out.order);
    for p in &out.generators {
        let _ = writeln!(text, "{p}");
    }
    let result = json!({
        "n": g.n(),
        "order": out.order.to_string(),
        "orbits": orbits,
        "generators": cycles(&out.generators),
    });
    Ok((text, result, EXIT_VERDICT))
}

fn canon(input: &GraphInput, out: Option<&Path>, common: &Common) -> Res {
    let g = load_graph(input)?;
    let res = g.analyse(common.nodes)?;
    let c = g.canonical(common.nodes)?;
    let form_text = formats::format_digraph_text(&c.form);
    if let Some(path) = out {
        std::fs::write(path, &form_text).with_context(|| format!("writing {}", path.display()))?;
    }
    let result = json!({
        "n": g.n(),
        "labelling": c.labelling.to_string(),
        "aut_order": res.order.to_string(),
        "form": DigraphJson::from_graph(&c.form),
    });
    Ok((format!("labelling {}\n{form_text}", c.labelling), result, EXIT_VERDICT))
}

fn pair(group: &str, s: &str, t: &str, common: &Common) -> Res {
    let (spec, s) = group_and_set(group, s)?;
    let t = formats::parse_set(t, &spec).context("--t")?;
    let verdict = ci_pair(&spec, &s, &t, common.nodes)?;
    let (text, result) = match &verdict {
        CiVerdict::NotIsomorphic => ("not isomorphic\n".to_string(), json!({ "verdict": "not-isomorphic" })),
        CiVerdict::CiEquivalent(mu) => {
            let ok = mu.image_of_set(&s) == t;
            (
                format!("CI-equivalent: mu = {}\n", mu.perm()),
                json!({ "verdict": "ci-equivalent", "mu": mu.perm().to_string(), "verified": ok }),
            )
        }
        CiVerdict::NonCiWitness(sigma) => {
            let gs = CayleyGraph::new(&spec, &s)?;
            let gt = CayleyGraph::new(&spec, &t)?;
            let ok = gs.graph().is_isomorphism(gt.graph(), sigma);
            (
                format!("isomorphic, not by a group automorphism: sigma = {sigma}\n"),
                json!({ "verdict": "non-ci", "sigma": sigma.to_string(), "verified": ok }),
            )
        }
    };
    Ok((text, result, EXIT_VERDICT))
}

fn is_symmetric(spec: &GroupSpec, set: &[usize]) -> bool {
    let mut neg: Vec<usize> = set.iter().map(|&x| spec.neg(x)).collect();
    neg.sort_unstable();
    neg == set
}

/// Re-checks a witness: `sigma` is an isomorphism and no automorphism of the
/// group maps `S` to `T`.
pub fn witness_valid(spec: &GroupSpec, s: &[usize], w: &Witness, cap: usize) -> Result<bool> {
    let gs = CayleyGraph::new(spec, s)?;
    let gt = CayleyGraph::new(spec, &w.t)?;
    if !gs.graph().is_isomorphism(gt.graph(), &w.sigma) {
        return Ok(false);
    }
    Ok(!aut_group(spec, cap)?.iter().any(|mu| mu.image_of_set(s) == w.t))
}

fn class_name(c: SetClass) -> &'static str {
    match c {
        SetClass::Ci => "ci",
        SetClass::NonCi => "non-ci",
        SetClass::Skipped => "skipped",
    }
}

fn counts<'a>(entries: impl Iterator<Item = &'a cayleyci::ci::ScanEntry> + Clone) -> Value {
    let n = |c| entries.clone().filter(|e| e.class == c).count();
    json!({
        "sets": entries.clone().count(),
        "ci": n(SetClass::Ci),
        "non_ci": n(SetClass::NonCi),
        "skipped": n(SetClass::Skipped),
    })
}

fn dci_scan(
    group: &str,
    mode: ScanModeArg,
    samples: usize,
    allow_large: bool,
    list_sets: bool,
    common: &Common,
) -> Res {
    let spec = formats::parse_group(group)?;
    let b = budgets(common);
    let pool = pool(common)?;
    let report = match mode {
        ScanModeArg::Exhaustive => {
            let total = match exhaustive_size(&spec, allow_large) {
                Ok(t) => t,
                Err(_) => bail!(
                    "an exhaustive scan of order {} needs --allow-large (limit {} without it, 64 at most)",
                    spec.order(),
                    cayleyci::ci::EXHAUSTIVE_ORDER_LIMIT
                ),
            };
            let forms: Vec<_> = pool.install(|| {
                (0..total)
                    .into_par_iter()
                    .map(|m| canonical_of_mask(&spec, m, b.nodes))
                    .collect()
            });
            let mut acc = ScanAccumulator::new(&spec);
            for f in forms {
                acc.push(f?);
            }
            acc.finish()?
        }
        ScanModeArg::Sample => {
            let sets = sample_sets(&spec, samples, common.seed);
            let entries = pool.install(|| {
                sets.into_par_iter()
                    .map(|s| babai_entry(&spec, s, &b))
                    .collect::<cayleyci::Result<Vec<_>>>()
            })?;
            DciReport {
                spec: spec.clone(),
                mode: ScanMode::Sample {
                    count: samples,
                    seed: common.seed,
                },
                entries,
                buckets: 0,
                largest_bucket: 0,
                orbits: 0,
            }
        }
    };
    summarize_scan(&spec, &report, list_sets, common)
}

fn summarize_scan(spec: &GroupSpec, report: &DciReport, list_sets: bool, common: &Common) -> Res {
    let entries = report.entries.iter();
    let sym = report.entries.iter().filter(|e| is_symmetric(spec, &e.set));
    let mut witnesses = Vec::new();
    for (e, w) in report.witnesses() {
        witnesses.push(json!({
            "s": e.set,
            "t": w.t,
            "sigma": w.sigma.to_string(),
            "verified": witness_valid(spec, &e.set, w, common.enum_cap)?,
        }));
    }
    let (ci, non_ci, skipped) = (
        report.count(SetClass::Ci),
        report.count(SetClass::NonCi),
        report.count(SetClass::Skipped),
    );
    let mode = match report.mode {
        ScanMode::Exhaustive => "exhaustive",
        ScanMode::Sample { .. } => "sample",
    };
    let mut result = json!({
        "mode": mode,
        "totals": counts(entries),
        "all_ci": ci == report.entries.len(),
        "symmetric": counts(sym.clone()),
        "witnesses": witnesses,
    });
    if report.mode == ScanMode::Exhaustive {
        result["isomorphism_classes"] = json!(report.buckets);
        result["largest_class"] = json!(report.largest_bucket);
        result["aut_orbits"] = json!(report.orbits);
    }
    if list_sets {
        result["entries"] = report
            .entries
            .iter()
            .map(|e| json!({ "s": e.set, "class": class_name(e.class) }))
            .collect();
    }
    let g = format_group(spec);
    let mut text = if ci == report.entries.len() {
        format!("{g}: {} connection sets ({mode}), all CI\n", report.entries.len())
    } else {
        format!(
            "{g}: {} connection sets ({mode}), {ci} CI, {non_ci} non-CI, {skipped} undecided\n",
            report.entries.len()
        )
    };
    let sym_non = sym.filter(|e| e.class != SetClass::Ci).count();
    let _ = writeln!(text, "symmetric sets (S = -S) not CI: {sym_non}");
    for (e, w) in report.witnesses().take(TEXT_WITNESSES) {
        let _ = writeln!(
            text,
            "witness S={{{}}} T={{{}}} sigma={}",
            format_set(&e.set),
            format_set(&w.t),
            w.sigma
        );
    }
    let exit = if skipped > 0 { EXIT_INDETERMINATE } else { EXIT_VERDICT };
    Ok((text, result, exit))
}

fn babai(group: &str, s: &str, common: &Common) -> Res {
    let (spec, set) = group_and_set(group, s)?;
    let r = babai_ci(&spec, &set, &budgets(common))?;
    let verdict = match r.verdict {
        BabaiVerdict::Ci => "ci",
        BabaiVerdict::NotCi => "not-ci",
        BabaiVerdict::Indeterminate => "indeterminate",
    };
    let witness = match &r.witness {
        Some(w) => json!({
            "t": w.t,
            "sigma": w.sigma.to_string(),
            "verified": witness_valid(&spec, &set, w, common.enum_cap)?,
        }),
        None => Value::Null,
    };
    let result = json!({
        "s": set,
        "verdict": verdict,
        "aut_order": r.aut_order.as_ref().map(|o| o.to_string()),
        "regular_subgroups": r.regular_subgroups,
        "conjugate_to_regular_rep": r.conjugate,
        "witness": witness,
        "reason": r.reason,
    });
    let mut text = format!(
        "{verdict}: {} regular subgroups isomorphic to {}, {} conjugate to the regular representation\n",
        r.regular_subgroups,
        format_group(&spec),
        r.conjugate
    );
    if let Some(w) = &r.witness {
        let _ = writeln!(text, "witness T={{{}}} sigma={}", format_set(&w.t), w.sigma);
    }
    if let Some(reason) = &r.reason {
        let _ = writeln!(text, "reason: {reason}");
    }
    let exit = if r.verdict == BabaiVerdict::Indeterminate {
        EXIT_INDETERMINATE
    } else {
        EXIT_VERDICT
    };
    Ok((text, result, exit))
}

fn two_closure(
    gens: Option<&Path>,
    inline: &[String],
    degree: Option<usize>,
    out: Option<&Path>,
    common: &Common,
) -> Res {
    let text = match gens {
        Some(p) => read(p)?,
        None => inline.join("\n"),
    };
    let (n, perms) = formats::parse_generators(&text, degree)?;
    let g = PermGroup::new(n, perms)?;
    let closure = closure2(&g, common.nodes)?;
    let closed = closure.order() == g.order();
    if let Some(path) = out {
        std::fs::write(path, formats::format_generators(closure.generators()))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let result = json!({
        "degree": n,
        "order": g.order().to_string(),
        "closure_order": closure.order().to_string(),
        "two_closed": closed,
        "orbitals": orbitals(&g).num_colors,
        "generators": cycles(closure.generators()),
    });
    let text = format!(
        "order {}\nclosure order {}\n{}\n",
        g.order(),
        closure.order(),
        if closed { "2-closed" } else { "not 2-closed" }
    );
    Ok((text, result, EXIT_VERDICT))
}

fn conjugate(group: &str, s: &str, beta: Option<&str>, gring: Option<&Path>, common: &Common) -> Res {
    let (spec, set) = group_and_set(group, s)?;
    let gamma = CayleyGraph::new(&spec, &set)?;
    let n = spec.order();
    let mut input = json!({ "s": set });
    let ring = match (beta, gring) {
        (_, Some(path)) => {
            let (_, gens) = formats::parse_generators(&read(path)?, Some(n))?;
            PermGroup::new(n, gens)?
        }
        (Some(b), None) => {
            let (beta, source) = if b.trim().eq_ignore_ascii_case("random") {
                let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
                let (beta, source) = random_beta(&gamma, &mut rng, common.nodes)?;
                let name = match source {
                    BetaSource::AutGamma => "aut-gamma",
                    BetaSource::Affine => "affine",
                };
                (beta, name)
            } else {
                (formats::parse_perm(b, n)?, "given")
            };
            input["beta"] = json!(beta.to_string());
            input["beta_source"] = json!(source);
            input["beta_in_aut"] = json!(gamma.graph().is_automorphism(&beta));
            spec.regular_rep().conjugate_by(&beta)
        }
        (None, None) => {
            input["beta"] = json!("()");
            input["beta_source"] = json!("given");
            spec.regular_rep()
        }
    };
    input["ring_generators"] = json!(cycles(ring.generators()));
    let pb = PipelineBudgets {
        nodes: common.nodes,
        enum_cap: common.enum_cap,
    };
    match conjugate_p3q(&gamma, &ring, pb) {
        Ok(cert) => {
            let reverified = cert.verify(&gamma, &ring);
            let trace: Vec<Value> = cert
                .trace
                .iter()
                .map(|r| json!({ "step": r.name, "detail": r.detail, "moved": r.moved }))
                .collect();
            let result = json!({
                "input": input,
                "outcome": "certificate",
                "case": cert.case.name(),
                "alpha": cert.alpha.to_string(),
                "checks": {
                    "alpha_in_aut": cert.alpha_in_aut,
                    "conjugates_onto_hat": cert.conjugates,
                    "reverified": reverified,
                },
                "trace": trace,
            });
            let mut text = format!("certificate ({})\nalpha = {}\n", cert.case.name(), cert.alpha);
            for r in &cert.trace {
                let _ = writeln!(text, "  {}: {} ({} points moved)", r.name, r.detail, r.moved);
            }
            Ok((text, result, EXIT_VERDICT))
        }
        Err(PipelineError::Inapplicable(reason)) => {
            let result = json!({
                "input": input,
                "outcome": "inapplicable",
                "reason": { "label": reason.label(), "detail": reason.to_string() },
            });
            Ok((format!("inapplicable: {reason}\n"), result, EXIT_INDETERMINATE))
        }
        Err(PipelineError::Precondition(m)) => bail!("precondition: {m}"),
        Err(PipelineError::Internal(e)) => Err(e.into()),
    }
}
