//! Verification harness: audits the hypotheses of the core non-emptiness
//! results on a game family, samples admissible belief families, and checks
//! that the equal split stays unblocked at every level.
//!
//! Sampling cells `(sample, s)` and checking cells `(sample, n)` are
//! independent and run through [`par::map`]; results are assembled by cell
//! index, so reports do not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;
use serde::Serialize;

use crate::beliefs::{
    admissible_family_check, regime_classify, sample_admissible_family_with, singleton_threshold, AdmissibilityMode,
    BaseCase, BeliefFamily, BeliefFile, FamilyCheckReport, PropRegime, RegimeReport, SamplerOptions,
    SingletonThreshold,
};
use crate::error::{Error, Result};
use crate::game::{check_yi_p2, is_efficient, EfficiencyReport, ExternalitySign, GameFamily, GameFile, YiReport};
use crate::induced::{core_nonempty_lp, equal_split_in_core, induce, EqualSplitReport};
use crate::limits;
use crate::par::{self, Execution};
use crate::random;
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    /// Positive externalities, `V^{γ_{n+1}} ≤ n/(n+1)·V^{γ_n}`, admissible beliefs.
    Prop1,
    /// Positive externalities, the complementary regime, R-admissible beliefs.
    Prop2,
    /// Negative externalities with the mirrored interval.
    NegativeMirror,
}

impl VerifyMode {
    pub fn admissibility(self) -> AdmissibilityMode {
        match self {
            VerifyMode::Prop1 => AdmissibilityMode::Admissible,
            VerifyMode::Prop2 => AdmissibilityMode::RAdmissible,
            VerifyMode::NegativeMirror => AdmissibilityMode::NegativeMirror,
        }
    }

    pub fn sign(self) -> ExternalitySign {
        self.admissibility().required_sign()
    }

    fn regime(self) -> Option<PropRegime> {
        match self {
            VerifyMode::Prop1 => Some(PropRegime::Prop1),
            VerifyMode::Prop2 => Some(PropRegime::Prop2),
            VerifyMode::NegativeMirror => None,
        }
    }
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyMode::Prop1 => "prop1",
            VerifyMode::Prop2 => "prop2",
            VerifyMode::NegativeMirror => "mirror",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub mode: VerifyMode,
    pub samples: usize,
    pub seed: u64,
    /// Largest `n` at which the LP verdict is cross-checked.
    pub lp_max_n: usize,
    pub execution: Execution,
}

impl VerifyConfig {
    pub fn new(mode: VerifyMode, samples: usize, seed: u64) -> VerifyConfig {
        VerifyConfig {
            mode,
            samples,
            seed,
            lp_max_n: 7,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelAudit {
    pub n: usize,
    #[serde(with = "rational::serde_str")]
    pub grand: Rational,
    pub efficiency: EfficiencyReport,
    pub externalities: ExternalitySign,
    pub sign_ok: bool,
    pub yi_p2: Option<YiReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegimeAudit {
    #[serde(flatten)]
    pub report: RegimeReport,
    pub matches_mode: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisAudit {
    pub levels: Vec<LevelAudit>,
    /// First `n` with `V_n(N) > V_{n+1}(N)`.
    pub grand_monotonicity_violation: Option<usize>,
    pub regimes: Vec<RegimeAudit>,
    /// Sizes whose steps fall in both regimes.
    pub mixed_regime_sizes: Vec<usize>,
    pub base_case: Option<BaseCase>,
    pub failures: Vec<String>,
    pub hypotheses_met: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Holds,
    Counterexample,
    HypothesesNotMet,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Holds => 0,
            Outcome::Counterexample => 1,
            Outcome::HypothesesNotMet => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CounterexampleKind {
    /// The sampler produced a family the checker rejects.
    InadmissibleSample,
    /// Equal split blocked at some level.
    EqualSplitBlocked,
    /// Equal split unblocked at `n` and the step held, yet blocked at `n + 1`.
    BrokenChain,
    /// LP verdict differs from the equal-split verdict.
    LpDisagreement,
}

/// Everything needed to re-check a failure by hand.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub kind: CounterexampleKind,
    pub sample: usize,
    pub n: usize,
    pub s: Option<usize>,
    pub detail: String,
    pub game: GameFile,
    pub beliefs: Vec<BeliefFile>,
    #[serde(with = "rational::serde_vec_str")]
    pub margins: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellSummary {
    pub n: usize,
    pub s: usize,
    pub checked: usize,
    pub unblocked: usize,
    /// Smallest `s·V(N)/n − V^h(s)` seen.
    #[serde(with = "rational::serde_opt_str")]
    pub min_equal_split_margin: Option<Rational>,
    /// Smallest `(n−1)·V^{h_{n−1}} − n·V^{h_n}` over steps into this level.
    #[serde(with = "rational::serde_opt_str")]
    pub min_step_margin: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfeasibleSample {
    pub sample: usize,
    pub s: usize,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginRow {
    pub n: usize,
    pub s: usize,
    pub sample: usize,
    pub margin: Rational,
    pub unblocked: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub family: String,
    pub mode: VerifyMode,
    pub n_min: usize,
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub audit: HypothesisAudit,
    pub cells: Vec<CellSummary>,
    pub lp_checks: usize,
    pub lp_agreements: usize,
    pub infeasible: Vec<InfeasibleSample>,
    pub counterexamples: Vec<Counterexample>,
    pub outcome: Outcome,
    #[serde(skip)]
    pub margin_rows: Vec<MarginRow>,
}

impl VerificationReport {
    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `n,s,sample,margin_num,margin_den,verdict`, one row per checked cell.
    pub fn margins_csv(&self) -> String {
        let mut out = String::from("n,s,sample,margin_num,margin_den,verdict\n");
        for r in &self.margin_rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n,
                r.s,
                r.sample,
                r.margin.numer(),
                r.margin.denom(),
                if r.unblocked { "unblocked" } else { "blocked" }
            ));
        }
        out
    }
}

pub fn audit_hypotheses(f: &GameFamily, mode: VerifyMode) -> HypothesisAudit {
    let mut failures = Vec::new();
    let levels: Vec<LevelAudit> = f
        .games()
        .iter()
        .map(|g| {
            let efficiency = is_efficient(g);
            let sign = g.externalities().sign;
            let yi_p2 = mode.regime().map(|_| check_yi_p2(g));
            if !efficiency.efficient {
                failures.push(format!("n = {}: grand coalition not efficient", g.n()));
            }
            if efficiency.tie {
                failures.push(format!("n = {}: a partition ties the grand coalition's worth", g.n()));
            }
            if sign != mode.sign() {
                failures.push(format!(
                    "n = {}: externalities are {sign}, mode needs {}",
                    g.n(),
                    mode.sign()
                ));
            }
            if let Some(y) = &yi_p2 {
                if !y.holds {
                    failures.push(format!("n = {}: smaller coalitions do not earn more per member", g.n()));
                }
            }
            LevelAudit {
                n: g.n(),
                grand: g.grand().clone(),
                efficiency,
                externalities: sign,
                sign_ok: sign == mode.sign(),
                yi_p2,
            }
        })
        .collect();

    let grand_violation = f.grand_monotonicity_violation();
    if let Some(n) = grand_violation {
        failures.push(format!("grand worth decreases from n = {n} to n = {}", n + 1));
    }

    let mut regimes = Vec::new();
    let mut mixed = Vec::new();
    if let Some(required) = mode.regime() {
        let mut seen: BTreeMap<usize, (bool, bool)> = BTreeMap::new();
        for pair in f.games().windows(2) {
            for s in 1..pair[0].n() {
                let Ok(report) = regime_classify(&pair[0], &pair[1], s) else {
                    continue;
                };
                let matches_mode = report.regime == required;
                let entry = seen.entry(s).or_default();
                if matches_mode {
                    entry.0 = true;
                } else {
                    entry.1 = true;
                    failures.push(format!(
                        "step {} -> {}, s = {s}: regime is {:?}, mode needs {required:?}",
                        report.n,
                        report.n + 1,
                        report.regime
                    ));
                }
                regimes.push(RegimeAudit { report, matches_mode });
            }
        }
        mixed = seen
            .into_iter()
            .filter(|(_, (a, b))| *a && *b)
            .map(|(s, _)| s)
            .collect();
    }

    let base_case = f.get(3).and_then(|g| singleton_threshold(g).ok());
    if let Some(b) = &base_case {
        if b.threshold == SingletonThreshold::Unattainable {
            failures.push("n = 3: no belief keeps a singleton from blocking".into());
        }
    }

    HypothesisAudit {
        hypotheses_met: failures.is_empty(),
        levels,
        grand_monotonicity_violation: grand_violation,
        regimes,
        mixed_regime_sizes: mixed,
        base_case,
        failures,
    }
}

enum CellResult {
    Sampled(BeliefFamily, FamilyCheckReport),
    Infeasible(usize),
}

struct LevelResult {
    sample: usize,
    n: usize,
    equal: EqualSplitReport,
    lp: Option<bool>,
}

/// Runs the audit and, when it passes, `samples` belief families per
/// coalition size with conclusion checks at every level.
pub fn verify_proposition(f: &GameFamily, family: &str, config: &VerifyConfig) -> Result<VerificationReport> {
    if f.n_min() != 3 {
        return Err(Error::InvalidArgument(format!(
            "verification families start at n = 3, got {}",
            f.n_min()
        )));
    }
    limits::check("verification n_max", f.n_max(), limits::VERIFY_MAX_N)?;
    let audit = audit_hypotheses(f, config.mode);
    let mut report = VerificationReport {
        family: family.to_string(),
        mode: config.mode,
        n_min: f.n_min(),
        n_max: f.n_max(),
        samples: config.samples,
        seed: config.seed,
        audit,
        cells: Vec::new(),
        lp_checks: 0,
        lp_agreements: 0,
        infeasible: Vec::new(),
        counterexamples: Vec::new(),
        outcome: Outcome::Holds,
        margin_rows: Vec::new(),
    };
    if !report.audit.hypotheses_met {
        report.outcome = Outcome::HypothesesNotMet;
        return Ok(report);
    }
    if config.samples == 0 || f.n_max() < 3 {
        return Ok(report);
    }

    let adm = config.mode.admissibility();
    let sizes: Vec<usize> = (1..f.n_max()).collect();
    let singleton_cap = f.get(3).map(|g| g.grand() / rational::int(3));

    let cell_keys: Vec<(usize, usize)> = (0..config.samples)
        .flat_map(|j| sizes.iter().map(move |&s| (j, s)))
        .collect();
    let cells: Vec<Result<CellResult>> = par::map(config.execution, cell_keys.clone(), |(j, s)| {
        let seed = random::derive_seed(config.seed, &[j as u64, s as u64]);
        let options = SamplerOptions {
            first_level_cap: if s == 1 { singleton_cap.clone() } else { None },
        };
        match sample_admissible_family_with(f, s, seed, adm, &options) {
            Ok(b) => {
                let check = admissible_family_check(f, &b, adm)?;
                Ok(CellResult::Sampled(b, check))
            }
            Err(Error::InfeasibleStep { n, .. }) => Ok(CellResult::Infeasible(n)),
            Err(e) => Err(e),
        }
    });
    let mut by_sample: Vec<BTreeMap<usize, (BeliefFamily, FamilyCheckReport)>> =
        (0..config.samples).map(|_| BTreeMap::new()).collect();
    for ((j, s), cell) in cell_keys.into_iter().zip(cells) {
        match cell? {
            CellResult::Sampled(b, check) => {
                if !check.admissible {
                    let bad = check.steps.iter().find(|v| !v.passed).expect("some step failed");
                    let g = f.get(bad.n).expect("in range");
                    report.counterexamples.push(Counterexample {
                        kind: CounterexampleKind::InadmissibleSample,
                        sample: j,
                        n: bad.n,
                        s: Some(s),
                        detail: format!("sampled family fails the step {} -> {}", bad.n, bad.n + 1),
                        game: g.to_file(),
                        beliefs: b.to_files(),
                        margins: check.steps.iter().map(|v| v.step.margin.clone()).collect(),
                    });
                }
                by_sample[j].insert(s, (b, check));
            }
            CellResult::Infeasible(n) => report.infeasible.push(InfeasibleSample { sample: j, s, n }),
        }
    }

    // A level is checkable when every size below it was sampled.
    let level_keys: Vec<(usize, usize)> = (0..config.samples)
        .flat_map(|j| (3..=f.n_max()).map(move |n| (j, n)))
        .filter(|&(j, n)| (1..n).all(|s| by_sample[j].contains_key(&s)))
        .collect();
    let levels: Vec<Result<LevelResult>> = par::map(config.execution, level_keys, |(j, n)| {
        let g = f.get(n).expect("in range");
        let beliefs = (1..n)
            .map(|s| (s, by_sample[j][&s].0.get(n).expect("family covers level").clone()))
            .collect();
        let ig = induce(g, &beliefs)?;
        let equal = equal_split_in_core(&ig);
        let lp = if n <= config.lp_max_n {
            Some(core_nonempty_lp(&ig)?.nonempty)
        } else {
            None
        };
        Ok(LevelResult {
            sample: j,
            n,
            equal,
            lp,
        })
    });

    let mut margins: BTreeMap<(usize, usize, usize), Rational> = BTreeMap::new();
    for level in levels {
        let LevelResult { sample, n, equal, lp } = level?;
        let beliefs_at = |n: usize| -> Vec<BeliefFile> {
            (1..n)
                .map(|s| by_sample[sample][&s].0.get(n).expect("covered").to_file())
                .collect()
        };
        if let Some(lp_nonempty) = lp {
            report.lp_checks += 1;
            if lp_nonempty == equal.in_core {
                report.lp_agreements += 1;
            } else {
                report.counterexamples.push(Counterexample {
                    kind: CounterexampleKind::LpDisagreement,
                    sample,
                    n,
                    s: None,
                    detail: format!(
                        "LP says nonempty = {lp_nonempty}, equal split in core = {}",
                        equal.in_core
                    ),
                    game: f.get(n).expect("in range").to_file(),
                    beliefs: beliefs_at(n),
                    margins: equal.margins.clone(),
                });
            }
        }
        if !equal.in_core {
            report.counterexamples.push(Counterexample {
                kind: CounterexampleKind::EqualSplitBlocked,
                sample,
                n,
                s: equal.witness,
                detail: format!(
                    "coalitions of size {} block the equal split",
                    equal.witness.expect("blocked")
                ),
                game: f.get(n).expect("in range").to_file(),
                beliefs: beliefs_at(n),
                margins: equal.margins.clone(),
            });
        }
        for (i, m) in equal.margins.into_iter().enumerate() {
            margins.insert((n, i + 1, sample), m);
        }
    }

    // Induction chain: unblocked at n, step holds, grand weakly up => unblocked at n+1.
    let mut step_margins: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (j, fams) in by_sample.iter().enumerate() {
        for (&s, (b, check)) in fams {
            for v in &check.steps {
                let key = (v.n + 1, s);
                let entry = step_margins.entry(key).or_insert_with(|| v.step.margin.clone());
                if v.step.margin < *entry {
                    *entry = v.step.margin.clone();
                }
                let (Some(before), Some(after)) = (margins.get(&(v.n, s, j)), margins.get(&(v.n + 1, s, j))) else {
                    continue;
                };
                let grand_up = f.get(v.n).expect("in range").grand() <= f.get(v.n + 1).expect("in range").grand();
                if !before.is_negative() && v.passed && grand_up && after.is_negative() {
                    report.counterexamples.push(Counterexample {
                        kind: CounterexampleKind::BrokenChain,
                        sample: j,
                        n: v.n + 1,
                        s: Some(s),
                        detail: format!("equal split unblocked at n = {} but not at n = {}", v.n, v.n + 1),
                        game: f.get(v.n + 1).expect("in range").to_file(),
                        beliefs: b.to_files(),
                        margins: vec![before.clone(), v.step.margin.clone(), after.clone()],
                    });
                }
            }
        }
    }

    let mut cells: BTreeMap<(usize, usize), CellSummary> = BTreeMap::new();
    for (&(n, s, sample), m) in &margins {
        let c = cells.entry((n, s)).or_insert_with(|| CellSummary {
            n,
            s,
            checked: 0,
            unblocked: 0,
            min_equal_split_margin: None,
            min_step_margin: step_margins.get(&(n, s)).cloned(),
        });
        c.checked += 1;
        if !m.is_negative() {
            c.unblocked += 1;
        }
        if c.min_equal_split_margin.as_ref().is_none_or(|cur| m < cur) {
            c.min_equal_split_margin = Some(m.clone());
        }
        report.margin_rows.push(MarginRow {
            n,
            s,
            sample,
            margin: m.clone(),
            unblocked: !m.is_negative(),
        });
    }
    report.cells = cells.into_values().collect();
    report.counterexamples.sort_by_key(|c| (c.sample, c.n, c.kind as u8));
    if !report.counterexamples.is_empty() {
        report.outcome = Outcome::Counterexample;
    }
    debug_assert!(report
        .cells
        .iter()
        .all(|c| c.checked > 0 || c.min_equal_split_margin.is_none()));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::SymmetricGame;
    use crate::generators::{cournot_family, neg_family, CournotParams, NegFamilyParams};
    use crate::rational::ratio;

    #[test]
    fn cournot_prop1_holds() {
        let f = cournot_family(&CournotParams::unit(), 6).unwrap();
        let r = verify_proposition(&f, "cournot", &VerifyConfig::new(VerifyMode::Prop1, 10, 7)).unwrap();
        assert!(r.audit.hypotheses_met, "{:?}", r.audit.failures);
        assert_eq!(
            r.outcome,
            Outcome::Holds,
            "{:?}",
            r.counterexamples.first().map(|c| &c.detail)
        );
        assert!(r.infeasible.is_empty());
        assert_eq!(r.lp_checks, r.lp_agreements);
        assert_eq!(r.lp_checks, 10 * 4);
        // Every (n, s) with s < n is covered by all samples.
        assert_eq!(r.cells.len(), (3..=6).map(|n| n - 1).sum::<usize>());
        assert!(r.cells.iter().all(|c| c.checked == 10 && c.unblocked == 10));
    }

    #[test]
    fn cournot_fails_prop2_audit() {
        let f = cournot_family(&CournotParams::unit(), 5).unwrap();
        let r = verify_proposition(&f, "cournot", &VerifyConfig::new(VerifyMode::Prop2, 5, 7)).unwrap();
        assert_eq!(r.outcome, Outcome::HypothesesNotMet);
        assert_eq!(r.exit_code(), 2);
        assert!(r.cells.is_empty());
    }

    #[test]
    fn negative_family_mirror_holds() {
        let f = neg_family(&NegFamilyParams::new(ratio(1, 10)).unwrap(), 6).unwrap();
        let r = verify_proposition(&f, "negfam", &VerifyConfig::new(VerifyMode::NegativeMirror, 8, 3)).unwrap();
        assert!(r.audit.levels.iter().all(|l| l.sign_ok && l.efficiency.efficient));
        assert_eq!(r.outcome, Outcome::Holds);
        assert!(r.audit.regimes.is_empty());
    }

    #[test]
    fn audit_only_with_zero_samples() {
        let f = cournot_family(&CournotParams::unit(), 5).unwrap();
        let r = verify_proposition(&f, "cournot", &VerifyConfig::new(VerifyMode::Prop1, 0, 1)).unwrap();
        assert_eq!(r.outcome, Outcome::Holds);
        assert!(r.cells.is_empty() && r.margin_rows.is_empty());
        assert_eq!(r.audit.regimes.len(), (3..5).map(|n| n - 1).sum::<usize>());
        assert_eq!(
            r.audit.base_case.as_ref().unwrap().threshold,
            SingletonThreshold::AtMost(ratio(3, 7))
        );
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = cournot_family(&CournotParams::unit(), 6).unwrap();
        let mut cfg = VerifyConfig::new(VerifyMode::Prop1, 6, 11);
        let par = verify_proposition(&f, "cournot", &cfg).unwrap().to_json();
        cfg.execution = Execution::Sequential;
        let seq = verify_proposition(&f, "cournot", &cfg).unwrap().to_json();
        assert_eq!(par, seq);
    }

    #[test]
    fn decreasing_grand_worth_fails_audit() {
        let p = CournotParams::unit();
        let games = (3..=5)
            .map(|n| {
                let g = crate::generators::cournot_game(&p, n).unwrap();
                if n == 5 {
                    g.with_grand(ratio(1, 5))
                } else {
                    g
                }
            })
            .collect::<Vec<SymmetricGame>>();
        let f = GameFamily::new(games).unwrap();
        let r = verify_proposition(&f, "custom", &VerifyConfig::new(VerifyMode::Prop1, 2, 0)).unwrap();
        assert_eq!(r.audit.grand_monotonicity_violation, Some(4));
        assert_eq!(r.outcome, Outcome::HypothesesNotMet);
    }

    #[test]
    fn csv_has_fixed_header() {
        let f = cournot_family(&CournotParams::unit(), 4).unwrap();
        let r = verify_proposition(&f, "cournot", &VerifyConfig::new(VerifyMode::Prop1, 2, 5)).unwrap();
        let csv = r.margins_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,s,sample,margin_num,margin_den,verdict"));
        assert_eq!(lines.count(), 2 * (2 + 3));
    }
}
