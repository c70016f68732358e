use std::collections::BTreeMap;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::{CorpusSpec, GenError};
use crate::cover::{BranchedCover, CoverFile};
use crate::fiber::{FiberAnalysis, FiberError, SdOutcome, DEFAULT_ORDER_CAP};
use crate::perm::{factorial, Transitivity};

/// Tally for one checked statement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CheckCount {
    pub checked: usize,
    pub passed: usize,
    /// Covers where the statement holds for degenerate reasons (`d = 1`).
    pub vacuous: usize,
}

impl CheckCount {
    pub fn failed(&self) -> usize {
        self.checked - self.passed
    }

    fn merge(&mut self, other: &CheckCount) {
        self.checked += other.checked;
        self.passed += other.passed;
        self.vacuous += other.vacuous;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CorpusViolation {
    pub check: String,
    pub detail: String,
    pub cover: CoverFile,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct NonGaloisOracle {
    /// Quotient and dual graph have the same edges.
    pub equal: usize,
    /// Quotient edges form a proper subset of the dual graph's.
    pub strict_subset: usize,
    pub other: usize,
    pub over_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub covers: usize,
    pub genuinely_ramified: usize,
    pub not_genuinely_ramified: usize,
    pub morse: usize,
    pub galois: usize,
    pub sd_certified: usize,
    /// Galois closure order ↦ number of covers.
    pub closure_orders: BTreeMap<u64, usize>,
    pub checks: BTreeMap<String, CheckCount>,
    pub nongalois_oracle: NonGaloisOracle,
    /// Sorted by check, then cover.
    pub violations: Vec<CorpusViolation>,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn check(&self, name: &str) -> CheckCount {
        self.checks.get(name).copied().unwrap_or_default()
    }
}

pub const CHECKS: [&str; 10] = [
    "equivalence",
    "offdiag_connected",
    "two_transitive",
    "sd_order",
    "sd_certificate",
    "derived_cover",
    "oracle_galois",
    "oracle_connectivity",
    "morse_branching",
    "partition",
];

#[derive(Default)]
struct Outcome {
    checks: BTreeMap<&'static str, CheckCount>,
    gr: bool,
    morse: bool,
    galois: bool,
    certified: bool,
    order: u128,
    nongalois: NonGaloisOracle,
    violations: Vec<CorpusViolation>,
}

impl Outcome {
    fn record(&mut self, cover: &BranchedCover, check: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        let c = self.checks.entry(check).or_default();
        c.checked += 1;
        if ok {
            c.passed += 1;
        } else {
            self.violations.push(CorpusViolation {
                check: check.to_string(),
                detail: detail(),
                cover: cover.to_file(),
            });
        }
    }

    fn vacuous(&mut self, check: &'static str) {
        let c = self.checks.entry(check).or_default();
        c.checked += 1;
        c.passed += 1;
        c.vacuous += 1;
    }

    fn error(&mut self, cover: &BranchedCover, check: &'static str, e: FiberError) {
        self.record(cover, check, false, || e.to_string());
    }
}

fn verify_one(cover: &BranchedCover, oracle_cap: u128) -> Outcome {
    let mut out = Outcome::default();
    let fa = match FiberAnalysis::new(cover) {
        Ok(fa) => fa,
        Err(e) => {
            out.error(cover, "analysis", e);
            return out;
        }
    };
    let d = cover.degree();
    let gr = fa.genuinely_ramified().genuinely_ramified;
    let morse = cover.is_morse();
    let order = fa.galois_closure_order();
    let galois = order == d as u128;
    out.gr = gr;
    out.morse = morse;
    out.galois = galois;
    out.order = order;

    let dual = fa.dual_graph();
    let dual_connected = dual.is_connected().holds();
    out.record(cover, "equivalence", gr == dual_connected, || {
        format!("genuinely_ramified = {gr} but dual graph connected = {dual_connected}")
    });

    if gr {
        if d < 2 {
            out.vacuous("offdiag_connected");
        } else {
            let c = fa.offdiag_closure_connected();
            out.record(cover, "offdiag_connected", c.holds(), || {
                format!("genuinely ramified but off-diagonal closure is {c:?}")
            });
        }
    }

    let orbitals = fa.orbitals().len();
    let two_t = fa.group().transitivity() == Transitivity::TwoTransitive;
    out.record(cover, "two_transitive", (orbitals == 2) == two_t, || {
        format!("{orbitals} orbitals but two-transitive = {two_t}")
    });

    if gr && morse {
        out.record(cover, "sd_order", order == factorial(d), || {
            format!("Morse and genuinely ramified with closure order {order}, not {}", factorial(d))
        });
    }

    match fa.certify_sd() {
        Ok(SdOutcome::Certified(_)) => {
            out.certified = true;
            out.record(cover, "sd_certificate", true, String::new);
        }
        Ok(SdOutcome::Refused(reason)) => {
            let expected = gr && morse && d >= 2;
            out.record(cover, "sd_certificate", !expected, || {
                format!("hypotheses hold but certification refused: {reason}")
            });
        }
        Err(e) => out.error(cover, "sd_certificate", e),
    }

    if gr && morse && d >= 3 {
        match derived_check(&fa) {
            Ok(problems) => out.record(cover, "derived_cover", problems.is_empty(), || problems.join("; ")),
            Err(e) => out.error(cover, "derived_cover", e),
        }
    }

    if order <= oracle_cap {
        match fa.cayley_quotient_oracle(oracle_cap) {
            Ok(r) if galois => out.record(cover, "oracle_galois", r.edges_equal, || {
                format!(
                    "quotient edges {:?} differ from dual graph edges {:?}",
                    r.quotient_edges, r.dual_graph_edges
                )
            }),
            Ok(r) => {
                out.record(cover, "oracle_connectivity", r.agrees(), || {
                    "quotient connected but dual graph disconnected".to_string()
                });
                if r.edges_equal {
                    out.nongalois.equal += 1;
                } else if r.quotient_subset_of_dual {
                    out.nongalois.strict_subset += 1;
                } else {
                    out.nongalois.other += 1;
                }
            }
            Err(e) => out.error(cover, "oracle_galois", e),
        }
    } else if !galois {
        out.nongalois.over_cap += 1;
    }

    let points = fa.scheme_points();
    if morse {
        let bad = points.iter().find(|sp| {
            sp.branches.len() > 2
                || (sp.branches.len() == 2 && sp.branches.iter().filter(|b| b.orbital == 0).count() != 1)
        });
        out.record(cover, "morse_branching", bad.is_none(), || {
            format!("scheme point {:?}", bad.unwrap())
        });
    }

    let total: usize = fa.orbitals().iter().map(|o| o.size).sum();
    let bad = points.iter().find(|sp| {
        let (e, f) = (sp.cycles[0].len(), sp.cycles[1].len());
        sp.branches.len() != e.gcd(&f) || sp.branches.iter().any(|b| b.size != e.lcm(&f))
    });
    out.record(cover, "partition", total == d * d && bad.is_none(), || match bad {
        Some(sp) => format!("scheme point {sp:?} has wrong branch counts"),
        None => format!("orbital sizes sum to {total}, not {}", d * d),
    });

    out
}

fn derived_check(fa: &FiberAnalysis<'_>) -> Result<Vec<String>, FiberError> {
    let d = fa.cover().degree();
    let dc = fa.derived_cover()?;
    let mut problems = Vec::new();
    if dc.degree != d - 1 {
        problems.push(format!("derived degree {} instead of {}", dc.degree, d - 1));
    }
    if !dc.connected {
        problems.push("derived cover disconnected".into());
    }
    if !dc.morse {
        problems.push("derived cover not Morse".into());
    }
    if !dc.genuinely_ramified {
        problems.push(format!(
            "derived cover not genuinely ramified (étale subcover degree {})",
            dc.etale_subcover_degree
        ));
    }
    let over_x = fa.offdiag_genus_over_base()?;
    let over_y = dc.genus_over_y()?;
    if over_x != Some(over_y) {
        problems.push(format!("genus of Y' over X is {over_x:?}, over Y is {over_y}"));
    }
    Ok(problems)
}

/// Runs every check on every cover. Work is spread over the current rayon
/// pool; the report does not depend on scheduling.
pub fn verify_covers(covers: &[BranchedCover], oracle_cap: u128) -> VerificationReport {
    let outcomes: Vec<Outcome> = covers.par_iter().map(|c| verify_one(c, oracle_cap)).collect();
    let mut report = VerificationReport {
        covers: covers.len(),
        genuinely_ramified: 0,
        not_genuinely_ramified: 0,
        morse: 0,
        galois: 0,
        sd_certified: 0,
        closure_orders: BTreeMap::new(),
        checks: CHECKS.iter().map(|c| (c.to_string(), CheckCount::default())).collect(),
        nongalois_oracle: NonGaloisOracle::default(),
        violations: Vec::new(),
    };
    for o in outcomes {
        if o.gr {
            report.genuinely_ramified += 1;
        } else {
            report.not_genuinely_ramified += 1;
        }
        report.morse += o.morse as usize;
        report.galois += o.galois as usize;
        report.sd_certified += o.certified as usize;
        *report.closure_orders.entry(o.order as u64).or_default() += 1;
        for (name, c) in &o.checks {
            report.checks.entry(name.to_string()).or_default().merge(c);
        }
        let n = &mut report.nongalois_oracle;
        n.equal += o.nongalois.equal;
        n.strict_subset += o.nongalois.strict_subset;
        n.other += o.nongalois.other;
        n.over_cap += o.nongalois.over_cap;
        report.violations.extend(o.violations);
    }
    report.violations.sort();
    report
}

/// Builds the corpus (sequentially) and verifies it.
pub fn verify_corpus(spec: &CorpusSpec) -> Result<VerificationReport, GenError> {
    let covers: Vec<BranchedCover> = spec.covers()?.collect::<Result<_, _>>()?;
    log::info!("verifying {} covers", covers.len());
    Ok(verify_covers(&covers, DEFAULT_ORDER_CAP))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::Span;

    #[test]
    fn small_exhaustive_is_clean() {
        let spec = CorpusSpec::exhaustive(Span::new(1, 3), Span::single(0), Span::new(0, 3));
        let r = verify_corpus(&spec).unwrap();
        assert!(r.is_clean(), "{:?}", r.violations);
        assert!(r.covers > 0);
        assert_eq!(r.check("offdiag_connected").vacuous, 1);
    }

    #[test]
    fn torus_corpus_has_etale_covers() {
        let spec = CorpusSpec::exhaustive(Span::single(2), Span::single(1), Span::single(0));
        let r = verify_corpus(&spec).unwrap();
        assert!(r.is_clean());
        assert_eq!(r.covers, 3);
        assert_eq!(r.not_genuinely_ramified, 3);
    }

    #[test]
    fn bad_cover_is_reported() {
        // an invalid cover fails analysis and lands in the violation list
        let c = BranchedCover::genus_zero(3, &["(1 2)", "(1 3)"]);
        let r = verify_covers(&[c], DEFAULT_ORDER_CAP);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].check, "analysis");
    }
}
