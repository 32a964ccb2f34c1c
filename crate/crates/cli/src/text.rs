//! Aligned plain-text rendering of reports.

use std::fmt::Write;

use pfg_core::beliefs::{BaseCase, SingletonThreshold};
use pfg_core::game::{EfficiencyReport, ExternalityReport, MergeWitness, YiReport};
use pfg_core::harness::{Outcome, VerificationReport};
use pfg_core::induced::{Allocation, CoreVerdict, EqualSplitReport};
use pfg_core::rational::{approx, format as fmt_r};
use pfg_core::Rational;

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn merge(w: &MergeWitness) -> String {
    format!(
        "s={} {} -> {}: {} -> {}",
        w.s,
        w.before,
        w.after,
        fmt_r(&w.worth_before),
        fmt_r(&w.worth_after)
    )
}

pub fn check(
    n: usize,
    eff: &EfficiencyReport,
    ext: &ExternalityReport,
    yi: &YiReport,
    round_trip: Option<bool>,
) -> String {
    let mut out = String::new();
    writeln!(out, "players        {n}").unwrap();
    write!(
        out,
        "efficient      {}  grand {}",
        yes(eff.efficient),
        fmt_r(&eff.grand)
    )
    .unwrap();
    if let Some(v) = &eff.violation {
        write!(out, "; {} totals {}", v.shape, fmt_r(&v.total)).unwrap();
    }
    if eff.tie {
        write!(out, " (tie)").unwrap();
    }
    out.push('\n');
    writeln!(out, "externalities  {}  ({} merges)", ext.sign, ext.comparisons).unwrap();
    for (label, w) in [
        ("increase", &ext.increase),
        ("decrease", &ext.decrease),
        ("unchanged", &ext.unchanged),
    ] {
        if let Some(w) = w {
            writeln!(out, "  {label:<11}{}", merge(w)).unwrap();
        }
    }
    write!(out, "yi-p2          {}", yes(yi.holds)).unwrap();
    if let Some(v) = &yi.violation {
        write!(
            out,
            "  in {}: size {} gets {} per member, size {} gets {}",
            v.shape,
            v.small,
            fmt_r(&v.small_per_member),
            v.large,
            fmt_r(&v.large_per_member)
        )
        .unwrap();
    }
    out.push('\n');
    let sym = match round_trip {
        Some(b) => yes(b),
        None => "skipped",
    };
    writeln!(out, "symmetric      {sym}").unwrap();
    out
}

fn approx_col(on: bool, v: &Rational) -> String {
    if on {
        format!("  {:>12.6}", approx(v))
    } else {
        String::new()
    }
}

pub fn core(
    grand: &Rational,
    induced: &[Rational],
    split: &Allocation,
    verdict: &EqualSplitReport,
    lp: Option<&CoreVerdict>,
    show_approx: bool,
) -> String {
    let mut out = String::new();
    let n = induced.len() + 1;
    let header = if show_approx { "  approx (display only)" } else { "" };
    writeln!(out, "{:>3}  {:>16}  {:>16}{header}", "s", "V^h(s)", "margin").unwrap();
    for (i, (v, m)) in induced.iter().zip(&verdict.margins).enumerate() {
        writeln!(
            out,
            "{:>3}  {:>16}  {:>16}{}",
            i + 1,
            fmt_r(v),
            fmt_r(m),
            approx_col(show_approx, m)
        )
        .unwrap();
    }
    writeln!(out, "{n:>3}  {:>16}", fmt_r(grand)).unwrap();
    let payoffs: Vec<String> = split.payoffs().iter().map(fmt_r).collect();
    writeln!(out, "equal split    ({})", payoffs.join(", ")).unwrap();
    match verdict.witness {
        None => writeln!(out, "verdict        in core").unwrap(),
        Some(s) => writeln!(out, "verdict        blocked by coalitions of size {s}").unwrap(),
    }
    if let Some(lp) = lp {
        writeln!(
            out,
            "lp             {}",
            if lp.nonempty { "core non-empty" } else { "core empty" }
        )
        .unwrap();
        writeln!(out, "min total      {}", fmt_r(&lp.min_unblocked_total)).unwrap();
        if let Some(c) = &lp.certificate {
            let z: Vec<String> = c.payoffs().iter().map(fmt_r).collect();
            writeln!(out, "certificate    ({})", z.join(", ")).unwrap();
        }
        if let Some(w) = &lp.blocking_witness {
            writeln!(out, "balanced collection").unwrap();
            for c in w {
                let members: Vec<String> = c.members.iter().map(|i| (i + 1).to_string()).collect();
                writeln!(out, "  {{{}}}  weight {}", members.join(","), fmt_r(&c.weight)).unwrap();
            }
        }
    }
    out
}

pub fn threshold(b: &BaseCase) -> String {
    let mut out = String::new();
    writeln!(out, "share V(N)/3   {}", fmt_r(&b.share)).unwrap();
    writeln!(out, "singletons     {}", fmt_r(&b.gamma)).unwrap();
    writeln!(out, "merged         {}", fmt_r(&b.delta)).unwrap();
    let t = match &b.threshold {
        SingletonThreshold::AnyBelief => "AnyBelief".to_string(),
        SingletonThreshold::AtMost(p) => format!("p* = {} (merge probability at most)", fmt_r(p)),
        SingletonThreshold::AtLeast(p) => format!("p* = {} (merge probability at least)", fmt_r(p)),
        SingletonThreshold::Unattainable => "Unattainable".to_string(),
    };
    writeln!(out, "threshold      {t}").unwrap();
    out
}

fn opt(v: &Option<Rational>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), fmt_r)
}

pub fn verify(r: &VerificationReport, show_approx: bool) -> String {
    let mut out = String::new();
    writeln!(out, "family     {}", r.family).unwrap();
    writeln!(out, "mode       {}", r.mode).unwrap();
    writeln!(
        out,
        "levels     {}..={}  samples {}  seed {}",
        r.n_min, r.n_max, r.samples, r.seed
    )
    .unwrap();
    writeln!(out).unwrap();
    writeln!(
        out,
        "{:>3}  {:>14}  {:>9}  {:>13}  {:>5}",
        "n", "grand", "efficient", "externalities", "yi-p2"
    )
    .unwrap();
    for l in &r.audit.levels {
        let yi = l.yi_p2.as_ref().map_or("-", |y| yes(y.holds));
        writeln!(
            out,
            "{:>3}  {:>14}  {:>9}  {:>13}  {:>5}",
            l.n,
            fmt_r(&l.grand),
            yes(l.efficiency.efficient),
            l.externalities.to_string(),
            yi
        )
        .unwrap();
    }
    if !r.audit.regimes.is_empty() {
        writeln!(out).unwrap();
        writeln!(out, "{:>7}  {:>3}  {:>6}  case", "step", "s", "regime").unwrap();
        for a in &r.audit.regimes {
            writeln!(
                out,
                "{:>7}  {:>3}  {:>6}  {}",
                format!("{}->{}", a.report.n, a.report.n + 1),
                a.report.s,
                format!("{:?}", a.report.regime),
                serde_json::to_value(a.report.case).unwrap().as_str().unwrap()
            )
            .unwrap();
        }
    }
    if let Some(b) = &r.audit.base_case {
        writeln!(out).unwrap();
        out.push_str(&threshold(b));
    }
    for f in &r.audit.failures {
        writeln!(out, "unmet      {f}").unwrap();
    }
    if !r.cells.is_empty() {
        writeln!(out).unwrap();
        let header = if show_approx { "  approx (display only)" } else { "" };
        writeln!(
            out,
            "{:>3}  {:>3}  {:>7}  {:>9}  {:>20}  {:>20}{header}",
            "n", "s", "checked", "unblocked", "min margin", "min step margin"
        )
        .unwrap();
        for c in &r.cells {
            let ap = c
                .min_equal_split_margin
                .as_ref()
                .map_or(String::new(), |m| approx_col(show_approx, m));
            writeln!(
                out,
                "{:>3}  {:>3}  {:>7}  {:>9}  {:>20}  {:>20}{ap}",
                c.n,
                c.s,
                c.checked,
                c.unblocked,
                opt(&c.min_equal_split_margin),
                opt(&c.min_step_margin)
            )
            .unwrap();
        }
    }
    if r.lp_checks > 0 {
        writeln!(out, "lp         {}/{} verdicts agree", r.lp_agreements, r.lp_checks).unwrap();
    }
    if !r.infeasible.is_empty() {
        writeln!(
            out,
            "infeasible {} sampled families had no admissible continuation",
            r.infeasible.len()
        )
        .unwrap();
    }
    for c in &r.counterexamples {
        writeln!(out, "counterexample  sample {} n {}: {}", c.sample, c.n, c.detail).unwrap();
    }
    let outcome = match r.outcome {
        Outcome::Holds => "holds",
        Outcome::Counterexample => "counterexample found",
        Outcome::HypothesesNotMet => "hypotheses not met",
    };
    writeln!(out, "outcome    {outcome} (exit {})", r.exit_code()).unwrap();
    out
}
