//! Text formats: group specs, cycle notation, generator lists, connection
//! sets and colored digraphs.

use anyhow::{anyhow, bail, ensure, Context, Result};
use cayleyci::abgroups::GroupSpec;
use cayleyci::graphs::ColoredDigraph;
use cayleyci::Perm;
use serde::{Deserialize, Serialize};

/// Parses `Z8`, `Z2^3xZ11`, `z4 x z2` (case-insensitive; `x`, `*` or `×`
/// between factors). Factors keep the written order.
pub fn parse_group(text: &str) -> Result<GroupSpec> {
    let cleaned: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    ensure!(!cleaned.is_empty(), "empty group spec");
    let mut factors = Vec::new();
    for part in cleaned.split(['x', '*', '×']) {
        let body = part
            .strip_prefix('z')
            .ok_or_else(|| anyhow!("factor `{part}` must look like Z<n> or Z<n>^<k>"))?;
        let (base, exp) = match body.split_once('^') {
            Some((b, e)) => (b, e.parse::<u32>().with_context(|| format!("exponent in `{part}`"))?),
            None => (body, 1),
        };
        let n: usize = base.parse().with_context(|| format!("order in `{part}`"))?;
        ensure!(n >= 2, "factor orders must be at least 2");
        ensure!(exp >= 1, "exponent must be positive");
        factors.extend(std::iter::repeat_n(n, exp as usize));
    }
    Ok(GroupSpec::new(factors)?)
}

pub fn format_group(spec: &GroupSpec) -> String {
    let f = spec.factors();
    let mut parts = Vec::new();
    let mut i = 0;
    while i < f.len() {
        let run = f[i..].iter().take_while(|&&x| x == f[i]).count();
        parts.push(if run == 1 {
            format!("Z{}", f[i])
        } else {
            format!("Z{}^{run}", f[i])
        });
        i += run;
    }
    parts.join("x")
}

/// Parses cycle notation such as `(0 1 2)(3 4)`; commas may separate points,
/// `()` or `id` is the identity.
pub fn parse_perm(text: &str, degree: usize) -> Result<Perm> {
    let t = text.trim();
    if t.is_empty() || t == "()" || t.eq_ignore_ascii_case("id") {
        return Ok(Perm::identity(degree));
    }
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut rest = t;
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('(')
            .ok_or_else(|| anyhow!("expected `(` at `{rest}`"))?;
        let close = open.find(')').ok_or_else(|| anyhow!("unclosed cycle in `{t}`"))?;
        let body = &open[..close];
        let cycle = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().with_context(|| format!("point `{s}`")))
            .collect::<Result<Vec<_>>>()?;
        cycles.push(cycle);
        rest = open[close + 1..].trim_start();
    }
    Perm::from_cycles(degree, &cycles).map_err(|e| anyhow!("{e} in `{t}`"))
}

/// Degree implied by the largest point written in a cycle string.
pub fn implied_degree(text: &str) -> usize {
    text.split(|c: char| !c.is_ascii_digit())
        .filter_map(|s| s.parse::<usize>().ok())
        .max()
        .map_or(0, |m| m + 1)
}

/// One permutation per non-empty line; `#` starts a comment. Without an
/// explicit degree the largest point decides.
pub fn parse_generators(text: &str, degree: Option<usize>) -> Result<(usize, Vec<Perm>)> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect();
    let n = degree.unwrap_or_else(|| lines.iter().map(|l| implied_degree(l)).max().unwrap_or(0));
    ensure!(n > 0, "cannot infer a degree from an empty generator list");
    let gens = lines
        .iter()
        .enumerate()
        .map(|(i, l)| parse_perm(l, n).with_context(|| format!("generator line {}", i + 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok((n, gens))
}

pub fn format_generators(gens: &[Perm]) -> String {
    gens.iter().map(|g| format!("{g}\n")).collect()
}

/// Element of a tuple `(c0,c1,...;ck)`; `,` and `;` both separate
/// coordinates, one per cyclic factor in the written order.
pub fn parse_tuple(body: &str, spec: &GroupSpec) -> Result<usize> {
    let coords = body
        .split([',', ';'])
        .map(|s| s.trim().parse::<usize>().with_context(|| format!("coordinate `{s}`")))
        .collect::<Result<Vec<_>>>()?;
    ensure!(
        coords.len() == spec.rank(),
        "tuple ({body}) has {} coordinates, the group has {} factors",
        coords.len(),
        spec.rank()
    );
    for (c, f) in coords.iter().zip(spec.factors()) {
        ensure!(c < f, "coordinate {c} out of range for Z{f}");
    }
    Ok(spec.from_vector(&coords))
}

pub fn format_tuple(x: usize, spec: &GroupSpec) -> String {
    let v = spec.to_vector(x);
    let (head, last) = v.split_at(v.len() - 1);
    if head.is_empty() {
        return format!("({})", last[0]);
    }
    let head: Vec<String> = head.iter().map(usize::to_string).collect();
    format!("({};{})", head.join(","), last[0])
}

/// Connection set: element indices and/or tuples separated by commas, e.g.
/// `1,2,5` or `(0,0,1;3),(1,0,0;0)`. An empty string, `{}` or `empty` is the
/// empty set. The result is sorted without repeats.
pub fn parse_set(text: &str, spec: &GroupSpec) -> Result<Vec<usize>> {
    let t = text.trim();
    let t = t
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .unwrap_or(t)
        .trim();
    let mut out = Vec::new();
    if t.is_empty() || t.eq_ignore_ascii_case("empty") {
        return Ok(out);
    }
    let mut rest = t;
    while !rest.is_empty() {
        rest = rest.trim_start_matches(|c: char| c == ',' || c.is_whitespace());
        if rest.is_empty() {
            break;
        }
        if let Some(open) = rest.strip_prefix('(') {
            let close = open.find(')').ok_or_else(|| anyhow!("unclosed tuple in `{t}`"))?;
            out.push(parse_tuple(&open[..close], spec)?);
            rest = &open[close + 1..];
        } else {
            let end = rest.find(|c: char| c == ',' || c.is_whitespace()).unwrap_or(rest.len());
            let tok = &rest[..end];
            out.push(tok.parse::<usize>().with_context(|| format!("element `{tok}`"))?);
            rest = &rest[end..];
        }
    }
    for &x in &out {
        ensure!(
            x < spec.order(),
            "element {x} out of range for a group of order {}",
            spec.order()
        );
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn format_set(set: &[usize]) -> String {
    set.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Header `n k`, then `n` rows of `n` colors in `0..k`.
pub fn parse_digraph_text(text: &str) -> Result<ColoredDigraph> {
    let mut nums = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(|s| s.parse::<u64>().with_context(|| format!("number `{s}`")));
    let n = nums.next().ok_or_else(|| anyhow!("missing header"))?? as usize;
    let k = nums.next().ok_or_else(|| anyhow!("header needs `n k`"))??;
    let colors = nums.collect::<Result<Vec<u64>>>()?;
    ensure!(
        colors.len() == n * n,
        "expected {} colors, found {}",
        n * n,
        colors.len()
    );
    let colors = colors
        .into_iter()
        .map(|c| {
            ensure!(c < k, "color {c} out of range 0..{k}");
            Ok(c as u32)
        })
        .collect::<Result<Vec<u32>>>()?;
    Ok(ColoredDigraph::new(n, colors)?)
}

pub fn format_digraph_text(g: &ColoredDigraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.max_color() + 1);
    for u in 0..g.n() {
        let row: Vec<String> = g.row(u).iter().map(u32::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigraphJson {
    pub n: usize,
    pub colors: Vec<Vec<u32>>,
}

impl DigraphJson {
    pub fn from_graph(g: &ColoredDigraph) -> Self {
        DigraphJson {
            n: g.n(),
            colors: (0..g.n()).map(|u| g.row(u).to_vec()).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<ColoredDigraph> {
        ensure!(self.colors.len() == self.n, "expected {} rows", self.n);
        if let Some(r) = self.colors.iter().position(|row| row.len() != self.n) {
            bail!("row {r} does not have {} colors", self.n);
        }
        Ok(ColoredDigraph::new(self.n, self.colors.concat())?)
    }
}

/// Either digraph format, told apart by a leading `{`.
pub fn parse_digraph(text: &str) -> Result<ColoredDigraph> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str::<DigraphJson>(text)?.to_graph()
    } else {
        parse_digraph_text(text)
    }
}
