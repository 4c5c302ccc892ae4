use std::time::Instant;

use affine_yangian::evalmap::{ev_htilde1, evaluation_assignment, EvalParams};
use affine_yangian::pbw::{straightener, LoopStraightener};
use affine_yangian::surjectivity::{self as surj, ClaimTerm, Rule, SurjError, Witness};
use affine_yangian::yangian::{
    check_relation, minimal_relations, EvalMode, Kind, Relation, RelationId, Verdict, YangianGenerator,
};
use affine_yangian::{CompletionElement, RankData, Scalar};
use rayon::prelude::*;

use crate::config::{invalid, ConfigError, Mode, RunConfig};
use crate::report::{Entry, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Identity {
    T0,
    Thm33,
    Claim1,
}

/// A command either produced a report, or stopped before any check ran.
pub type CmdResult = Result<Report, ConfigError>;

fn parse_ids(flag: &'static str, ids: &Option<Vec<String>>) -> Result<Option<Vec<RelationId>>, ConfigError> {
    ids.as_ref()
        .map(|v| {
            v.iter()
                .map(|s| RelationId::parse(s.trim()).ok_or_else(|| invalid(flag, format!("unknown relation id {s:?}"))))
                .collect()
        })
        .transpose()
}

pub fn verify_relations(cfg: &RunConfig) -> CmdResult {
    let params = cfg.params()?;
    let rank = params.rank;
    let mode = cfg.mode.unwrap_or(Mode::Symbolic);
    let window = cfg.window.unwrap_or(4);
    if !(0..=6).contains(&window) {
        return Err(invalid("window", "must lie in 0..=6"));
    }
    let smax = cfg.smax.unwrap_or(window as i64 + 2);
    let only = parse_ids("only", &cfg.only)?;
    let skip = parse_ids("skip", &cfg.skip)?.unwrap_or_default();
    let rels: Vec<Relation> = minimal_relations(&rank)
        .map_err(|e| invalid("m", e.to_string()))?
        .into_iter()
        .filter(|r| only.as_ref().is_none_or(|o| o.contains(&r.id)) && !skip.contains(&r.id))
        .collect();
    let asg = evaluation_assignment(&params, &mut straightener(rank)).map_err(|e| invalid("eps1", e.to_string()))?;
    let eval_mode = match mode {
        Mode::Symbolic => EvalMode::Symbolic,
        Mode::Truncated => EvalMode::Truncated { window, s_max: smax },
    };
    let entries: Vec<Entry> = rels
        .par_iter()
        .map_init(
            || straightener(rank),
            |st, rel| {
                let t = Instant::now();
                match check_relation(rel, &asg, eval_mode, (window, smax), st) {
                    Ok(out) => {
                        let used = match out.mode {
                            EvalMode::Symbolic => "symbolic".to_string(),
                            EvalMode::Truncated { window, s_max } => format!("truncated(N={window}, S_max={s_max})"),
                        };
                        let (pass, cx) = match out.verdict {
                            Verdict::Holds => (true, None),
                            Verdict::Fails { counterexample } => (false, Some(counterexample)),
                        };
                        Entry::new(out.label, rel.id.anchor(), pass)
                            .counterexample(cx)
                            .detail("mode", used)
                            .timed(t)
                    }
                    Err(e) => Entry::new(rel.label(), rel.id.anchor(), false).counterexample(Some(e.to_string())).timed(t),
                }
            },
        )
        .collect();
    let mut echo = cfg.clone().with_rank();
    echo.mode = Some(mode);
    echo.window = Some(window);
    echo.smax = Some(smax);
    Ok(Report::new("verify-relations", echo, entries))
}

fn dump_or_zero(x: &CompletionElement) -> String {
    let d = x.dump();
    if d.is_empty() {
        "0".to_string()
    } else {
        d.trim_end().to_string()
    }
}

fn node_range(cfg: &RunConfig, rank: &RankData) -> Result<Vec<usize>, ConfigError> {
    match cfg.i {
        Some(i) if i == 0 || i >= rank.size() => Err(invalid("i", format!("node must lie in 1..={}", rank.size() - 1))),
        Some(i) => Ok(vec![i]),
        None => Ok((1..rank.size()).collect()),
    }
}

fn mode_range(cfg: &RunConfig) -> Result<Vec<i32>, ConfigError> {
    match cfg.a {
        Some(0) => Err(invalid("a", "mode must be nonzero")),
        Some(a) => Ok(vec![a]),
        None => Ok(vec![-2, -1, 1, 2]),
    }
}

fn t0_entries(params: &EvalParams<Scalar>, st: &mut LoopStraightener) -> Result<Vec<Entry>, SurjError> {
    let t = Instant::now();
    let rep = surj::t0_identity(params, st)?;
    let correction = surj::t0_correction(params, st);
    let mut raw = CompletionElement::zero();
    for i in 0..params.rank.size() {
        raw.add_assign(&ev_htilde1(params, i, st)?);
    }
    let window_ok = {
        let lhs = raw.expand(6, st).truncate_project(4);
        let rhs = rep.rhs.add(&rep.residual).expand(6, st).truncate_project(4);
        lhs == rhs
    };
    let mut out = vec![
        Entry::new("t0.first-third", "Theorem 3.1", rep.first_third_ok())
            .detail("sum", dump_or_zero(&rep.first_third.0))
            .detail("telescoped", dump_or_zero(&rep.first_third.1)),
        Entry::new("t0.second-fourth", "Theorem 3.1", rep.second_fourth_ok())
            .detail("sum", dump_or_zero(&rep.second_fourth.0))
            .detail("telescoped", dump_or_zero(&rep.second_fourth.1)),
        Entry::new("t0.regrouping", "Theorem 3.1", rep.regrouping_exact),
        Entry::new("t0.window", "Theorem 3.1", window_ok).detail("window", "N=4, S_max=6"),
    ];
    let mut main = Entry::new("t0", "Theorem 3.1", rep.holds())
        .counterexample(rep.residual.first_term())
        .detail("residual_is_h0_correction", (rep.residual == correction).to_string());
    if !rep.holds() {
        main = main
            .detail("lhs", dump_or_zero(&rep.lhs))
            .detail("rhs", dump_or_zero(&rep.rhs))
            .detail("residual", dump_or_zero(&rep.residual));
    }
    out.push(main);
    let elapsed = t.elapsed().as_micros() as u64 / out.len() as u64;
    for e in &mut out {
        e.wall_time_us = elapsed;
    }
    Ok(out)
}

fn thm33_entries(
    cfg: &RunConfig,
    params: &EvalParams<Scalar>,
    st: &mut LoopStraightener,
) -> Result<Result<Vec<Entry>, SurjError>, ConfigError> {
    let rank = params.rank;
    let nodes = node_range(cfg, &rank)?;
    let modes = mode_range(cfg)?;
    let mut run = || -> Result<Vec<Entry>, SurjError> {
        let mut out = Vec::new();
        for &i in &nodes {
            for &a in &modes {
                let t = Instant::now();
                let d = surj::h1_diag_commutator(params, i, a, st)?;
                let same = rank.p(i) == rank.p(i + 1);
                let id = format!("thm33[i={i},a={a}]");
                let mut central = Entry::new(format!("{id}.central"), "Theorem 3.3", d.central_matches)
                    .detail("central_part", dump_or_zero(&d.central_part))
                    .detail("same_parity_node", same.to_string());
                if !d.central_matches {
                    central = central
                        .detail("formula", dump_or_zero(&CompletionElement::from_finite(d.four_term.clone())))
                        .counterexample(d.central_part.sub(&CompletionElement::from_finite(d.four_term.clone())).first_term());
                }
                out.push(central.timed(t));
                out.push(
                    Entry::new(format!("{id}.sl"), "Theorem 3.3", d.sl_check.in_sl)
                        .counterexample(d.sl_check.offending.clone())
                        .timed(t),
                );
            }
        }
        Ok(out)
    };
    Ok(run())
}

fn claim_anchor(term: ClaimTerm) -> &'static str {
    match term {
        ClaimTerm::Term3 => "Claim 1, third term",
        ClaimTerm::Term4 => "Claim 1, fourth term",
        ClaimTerm::Term5 => "Claim 1, fifth term",
        ClaimTerm::Term6 => "Claim 1, sixth term",
    }
}

fn claim1_entries(
    cfg: &RunConfig,
    params: &EvalParams<Scalar>,
    st: &mut LoopStraightener,
) -> Result<Result<Vec<Entry>, SurjError>, ConfigError> {
    let nodes = node_range(cfg, &params.rank)?;
    let modes = mode_range(cfg)?;
    let terms = match cfg.term {
        Some(k) => vec![ClaimTerm::from_number(k).ok_or_else(|| invalid("term", "must be 3, 4, 5 or 6"))?],
        None => ClaimTerm::ALL.to_vec(),
    };
    let mut run = || -> Result<Vec<Entry>, SurjError> {
        let mut out = Vec::new();
        for &i in &nodes {
            for &a in &modes {
                for &term in &terms {
                    let t = Instant::now();
                    let c = surj::claim1_terms(params, i, a, term, st)?;
                    let mut e = Entry::new(format!("claim1.term{}[i={i},a={a}]", term.number()), claim_anchor(term), c.matches)
                        .detail("sl_part_in_sl", c.sl_check.in_sl.to_string());
                    if !c.central_part.is_zero() {
                        e = e.detail("central_part", dump_or_zero(&c.central_part));
                    }
                    if !c.matches {
                        let gap = c.computed.sub(&c.display);
                        e = e
                            .counterexample(gap.first_term())
                            .detail("computed", dump_or_zero(&c.computed))
                            .detail("display", dump_or_zero(&c.display));
                    }
                    out.push(e.timed(t));
                }
            }
        }
        Ok(out)
    };
    Ok(run())
}

pub fn check_identity(cfg: &RunConfig, which: Identity) -> CmdResult {
    let params = cfg.params()?;
    let mut st = straightener(params.rank);
    let (name, result) = match which {
        Identity::T0 => ("check-identity t0", t0_entries(&params, &mut st)),
        Identity::Thm33 => ("check-identity thm33", thm33_entries(cfg, &params, &mut st)?),
        Identity::Claim1 => ("check-identity claim1", claim1_entries(cfg, &params, &mut st)?),
    };
    let echo = cfg.clone().with_rank();
    Ok(match result {
        Ok(entries) => Report::new(name, echo, entries),
        Err(e) => Report::failed(name, echo, e.to_string()),
    })
}

fn rule_anchor(rule: Rule) -> &'static str {
    match rule {
        Rule::C1 => "Corollary 3.2",
        Rule::C2 | Rule::Sl => "Corollary 3.5",
    }
}

fn rule_name(rule: Rule) -> &'static str {
    match rule {
        Rule::C1 => "c1",
        Rule::C2 => "c2",
        Rule::Sl => "sl",
    }
}

fn witness_entry(id: String, rule: Rule, w: &Witness<Scalar>, check: &surj::WitnessCheck, verbose: bool) -> Entry {
    let expr: Vec<String> = w.expression.iter().map(|t| format!("({}) * {}", t.coefficient, t.source)).collect();
    let mut e = Entry::new(id, rule_anchor(rule), check.verified())
        .counterexample(check.offending.clone())
        .detail("rule", rule_name(rule))
        .detail("expression", expr.join(" + "))
        .detail("exact", check.exact.to_string())
        .detail("residual_in_sl", check.residual_in_sl.to_string())
        .detail("window_agrees", check.window_agrees.to_string());
    if verbose {
        e = e.detail("residual", dump_or_zero(&w.residual)).detail("value", dump_or_zero(&w.value));
    }
    e
}

/// Largest mode offset in the images a density witness brackets: the loop
/// mode `N` plus the unit shift of the `s + 1` tails.
fn density_smax(cfg: &RunConfig, window: i32) -> Result<i64, ConfigError> {
    let band = 2 * window as i64 + 2;
    match cfg.smax {
        Some(s) if s < band => Err(invalid("smax", format!("guard band needs S_max >= {band} at window {window}"))),
        Some(s) => Ok(s),
        None => Ok(band),
    }
}

pub fn density_report(cfg: &RunConfig) -> CmdResult {
    let params = cfg.params()?;
    let window = cfg.window.unwrap_or(2);
    if !(0..=4).contains(&window) {
        return Err(invalid("window", "must lie in 0..=4"));
    }
    let smax = density_smax(cfg, window)?;
    let mut echo = cfg.clone().with_rank();
    echo.window = Some(window);
    echo.smax = Some(smax);
    let t = Instant::now();
    let rep = match surj::density_report(&params, window, smax, &mut straightener(params.rank)) {
        Ok(r) => r,
        Err(e) => return Ok(Report::failed("density-report", echo, e.to_string())),
    };
    let each = t.elapsed().as_micros() as u64 / rep.entries.len().max(1) as u64;
    let entries = rep
        .entries
        .iter()
        .map(|d| {
            let mut e = witness_entry(d.target(), d.rule, &d.witness, &d.check, false);
            e.wall_time_us = each;
            e
        })
        .collect();
    Ok(Report::new("density-report", echo, entries))
}

pub fn witness(cfg: &RunConfig) -> CmdResult {
    let params = cfg.params()?;
    let rank = params.rank;
    let nn = rank.size();
    let row = cfg.row.unwrap_or(nn);
    if row == 0 || row > nn {
        return Err(invalid("row", format!("must lie in 1..={nn}")));
    }
    let a = cfg.a.unwrap_or(0);
    let window = cfg.window.unwrap_or(a.abs().max(1));
    if a.abs() > window || window > 4 {
        return Err(invalid("window", "needs |a| <= N <= 4"));
    }
    let smax = density_smax(cfg, window)?;
    let mut echo = cfg.clone().with_rank();
    echo.row = Some(row);
    echo.a = Some(a);
    echo.window = Some(window);
    echo.smax = Some(smax);
    let t = Instant::now();
    // a single-mode report holds exactly the targets at mode a
    let rep = match surj::density_report(&params, window, smax, &mut straightener(rank)) {
        Ok(r) => r,
        Err(e) => return Ok(Report::failed("witness", echo, e.to_string())),
    };
    let d = rep.entries.iter().find(|d| d.row == row && d.mode == a).expect("target in window");
    let e = witness_entry(d.target(), d.rule, &d.witness, &d.check, true).timed(t);
    Ok(Report::new("witness", echo, vec![e]))
}

pub fn dump_image(cfg: &RunConfig, generator: &str) -> CmdResult {
    let params = cfg.params()?;
    let g: YangianGenerator = generator.parse().map_err(|e: String| invalid("generator", e))?;
    if g.level > 1 || g.node >= params.rank.size() {
        return Err(invalid("generator", "images exist for nodes 0..m+n-1 at levels 0 and 1"));
    }
    let t = Instant::now();
    let mut st = straightener(params.rank);
    let image = match g.kind {
        Kind::H if g.level == 1 => affine_yangian::evalmap::ev_h1(&params, g.node, &mut st),
        Kind::H => affine_yangian::evalmap::ev_level0(&params.rank, g.node, Kind::H),
        k if g.level == 1 => affine_yangian::evalmap::ev_x1(&params, g.node, k.sign(), &mut st),
        k => affine_yangian::evalmap::ev_level0(&params.rank, g.node, k),
    };
    let echo = cfg.clone().with_rank();
    Ok(match image {
        Ok(x) => {
            let e = Entry::new(g.to_string(), "Theorem 2.3", true)
                .detail("parity", format!("{:?}", x.parity(&params.rank)))
                .detail("image", dump_or_zero(&x))
                .timed(t);
            Report::new("dump-image", echo, vec![e])
        }
        Err(e) => Report::failed("dump-image", echo, e.to_string()),
    })
}
