//! Monotone 1-in-3 SAT and its encoding as a matching instance with
//! overlapping classes.
//!
//! For a formula with `n` variables and `m` clauses the instance has
//! `2n + 6m` applicants and `3n + m` posts, and a matching of signature
//! `(3m + n, 3m + n)` exists exactly when some assignment makes one
//! variable true in every clause.

use crate::error::{Error, Result};
use crate::instance::{Instance, RawInstance};
use crate::matching::Signature;

/// Largest variable count `brute_force_1in3` accepts.
pub const MAX_BRUTE_FORCE_VARS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneFormula {
    pub n: usize,
    /// 1-based variable indices, three distinct per clause.
    pub clauses: Vec<[usize; 3]>,
}

impl MonotoneFormula {
    pub fn new(n: usize, clauses: Vec<[usize; 3]>) -> Result<MonotoneFormula> {
        for (j, c) in clauses.iter().enumerate() {
            check_clause(c, n, j + 1)?;
        }
        Ok(MonotoneFormula { n, clauses })
    }

    /// Occurrences of variable `i` (1-based).
    pub fn occurrences(&self, i: usize) -> usize {
        self.clauses.iter().filter(|c| c.contains(&i)).count()
    }

    /// True iff every clause has exactly one true variable. `assignment[i-1]`
    /// is the value of variable `i`.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().filter(|&&v| assignment[v - 1]).count() == 1)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("p mono1in3 {} {}\n", self.n, self.clauses.len());
        for c in &self.clauses {
            out.push_str(&format!("{} {} {}\n", c[0], c[1], c[2]));
        }
        out
    }
}

fn check_clause(c: &[usize; 3], n: usize, line: usize) -> Result<()> {
    if let Some(&v) = c.iter().find(|&&v| v == 0 || v > n) {
        return Err(Error::Parse {
            line,
            message: format!("variable {v} out of range 1..={n}"),
        });
    }
    if c[0] == c[1] || c[0] == c[2] || c[1] == c[2] {
        return Err(Error::Parse {
            line,
            message: format!("clause repeats a variable: {} {} {}", c[0], c[1], c[2]),
        });
    }
    Ok(())
}

/// Parses `p mono1in3 <n> <m>` followed by `m` lines of three variable
/// indices. Blank lines and lines starting with `c` are skipped.
pub fn parse_formula(text: &str) -> Result<MonotoneFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut n = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if header.is_none() {
            let ok = tokens.len() == 4 && tokens[0] == "p" && tokens[1] == "mono1in3";
            let nums = ok
                .then(|| Some((tokens[2].parse().ok()?, tokens[3].parse().ok()?)))
                .flatten();
            let Some((hn, hm)) = nums else {
                return Err(Error::Parse {
                    line,
                    message: "expected header `p mono1in3 <n> <m>`".into(),
                });
            };
            header = Some((hn, hm));
            n = hn;
            continue;
        }
        let vars: Vec<usize> = tokens
            .iter()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse {
                line,
                message: format!("expected three variable indices, got `{trimmed}`"),
            })?;
        let clause: [usize; 3] = vars.try_into().map_err(|_| Error::Parse {
            line,
            message: format!("expected three variable indices, got `{trimmed}`"),
        })?;
        check_clause(&clause, n, line)?;
        clauses.push(clause);
    }
    let Some((n, m)) = header else {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing header `p mono1in3 <n> <m>`".into(),
        });
    };
    if clauses.len() != m {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: format!("header announces {m} clauses, found {}", clauses.len()),
        });
    }
    Ok(MonotoneFormula { n, clauses })
}

/// Builds the matching instance and the target signature `(3m + n, 3m + n)`.
///
/// Names: `a_i`, `b_i` and posts `p_i`, `pt_i`, `pf_i` per variable;
/// `a_i_j`, `b_i_j` per occurrence of variable `i` in clause `j`; `pc_j` per
/// clause. A variable that occurs nowhere gets quota 1 on `pt_i` and `pf_i`.
pub fn reduce(f: &MonotoneFormula) -> Result<(Instance, Signature)> {
    let mut raw = RawInstance::new();
    for i in 1..=f.n {
        raw.applicant(format!("a_{i}"), 1)
            .applicant(format!("b_{i}"), 1);
    }
    for (j0, c) in f.clauses.iter().enumerate() {
        for &i in sorted(c).iter() {
            let j = j0 + 1;
            raw.applicant(format!("a_{i}_{j}"), 1)
                .applicant(format!("b_{i}_{j}"), 1);
        }
    }
    for i in 1..=f.n {
        let k = f.occurrences(i).max(1) as i64;
        raw.post(format!("p_{i}"), 1)
            .post(format!("pt_{i}"), k)
            .post(format!("pf_{i}"), k);
    }
    for j in 1..=f.clauses.len() {
        raw.post(format!("pc_{j}"), 3);
    }

    for i in 1..=f.n {
        raw.pref(
            &format!("a_{i}"),
            &[&[format!("p_{i}")][..], &[format!("pt_{i}")][..]],
        );
        raw.pref(
            &format!("b_{i}"),
            &[&[format!("p_{i}")][..], &[format!("pf_{i}")][..]],
        );
    }
    for (j0, c) in f.clauses.iter().enumerate() {
        let j = j0 + 1;
        let vars = sorted(c);
        for &i in &vars {
            raw.pref(
                &format!("a_{i}_{j}"),
                &[&[format!("pc_{j}")][..], &[format!("pt_{i}")][..]],
            );
            raw.pref(
                &format!("b_{i}_{j}"),
                &[&[format!("pc_{j}")][..], &[format!("pf_{i}")][..]],
            );
        }
        let pc = format!("pc_{j}");
        for &i in &vars {
            raw.class(&pc, 1, &[format!("a_{i}_{j}"), format!("b_{i}_{j}")]);
        }
        let a_side: Vec<String> = vars.iter().map(|i| format!("a_{i}_{j}")).collect();
        let b_side: Vec<String> = vars.iter().map(|i| format!("b_{i}_{j}")).collect();
        raw.class(&pc, 1, &a_side);
        raw.class(&pc, 2, &b_side);
    }
    for i in 1..=f.n {
        for (j0, c) in f.clauses.iter().enumerate() {
            if c.contains(&i) {
                let j = j0 + 1;
                raw.class(
                    &format!("pt_{i}"),
                    1,
                    &[format!("a_{i}_{j}"), format!("a_{i}")],
                );
                raw.class(
                    &format!("pf_{i}"),
                    1,
                    &[format!("b_{i}_{j}"), format!("b_{i}")],
                );
            }
        }
    }
    let x = (3 * f.clauses.len() + f.n) as u64;
    Ok((raw.build()?, Signature(vec![x, x])))
}

fn sorted(c: &[usize; 3]) -> [usize; 3] {
    let mut s = *c;
    s.sort_unstable();
    s
}

/// Instance text headed by a `# target = (x, y)` comment.
pub fn reduction_text(inst: &Instance, target: &Signature) -> String {
    format!("# target = {target}\n{}", inst.to_text())
}

/// Exhaustive search for a 1-in-3 assignment. The first assignment found
/// in counting order (variable 1 is the lowest bit) is returned.
pub fn brute_force_1in3(f: &MonotoneFormula) -> Result<Option<Vec<bool>>> {
    if f.n > MAX_BRUTE_FORCE_VARS {
        return Err(Error::TooLarge {
            what: "variables",
            size: f.n,
            cap: MAX_BRUTE_FORCE_VARS,
        });
    }
    for bits in 0u32..(1u32 << f.n) {
        let assignment: Vec<bool> = (0..f.n).map(|i| bits >> i & 1 == 1).collect();
        if f.satisfied_by(&assignment) {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{PostId, Vertex};
    use crate::tree::vertex_is_laminar;

    #[test]
    fn parses_single_clause() {
        let f = parse_formula("p mono1in3 3 1\n1 2 3\n").unwrap();
        assert_eq!(f.n, 3);
        assert_eq!(f.clauses, vec![[1, 2, 3]]);
        assert_eq!(parse_formula(&f.to_text()).unwrap(), f);
        let with_comments =
            parse_formula("c a comment\n\np mono1in3 3 1\nc another\n1 2 3\n").unwrap();
        assert_eq!(with_comments, f);
    }

    #[test]
    fn rejects_bad_formulas() {
        let err = |t: &str| parse_formula(t).unwrap_err().to_string();
        assert!(err("p mono1in3 3 1\n1 1 2\n").contains("repeats"));
        assert!(err("p mono1in3 3 1\n1 2 4\n").contains("out of range"));
        assert!(err("p cnf 3 1\n1 2 3\n").contains("header"));
        assert!(err("p mono1in3 3 2\n1 2 3\n").contains("announces"));
        assert!(err("p mono1in3 3 1\n1 2\n").contains("three"));
        assert!(err("").contains("missing"));
        assert!(MonotoneFormula::new(2, vec![[1, 2, 3]]).is_err());
    }

    #[test]
    fn single_clause_sizes() {
        let f = MonotoneFormula::new(3, vec![[1, 2, 3]]).unwrap();
        let (inst, target) = reduce(&f).unwrap();
        assert_eq!(inst.applicant_count(), 12);
        assert_eq!(inst.post_count(), 10);
        assert_eq!(target, Signature(vec![6, 6]));
        let pc = inst.find_post("pc_1").unwrap();
        assert_eq!(inst.post_quota(pc), 3);
        assert!(!vertex_is_laminar(&inst, Vertex::Post(pc)));
    }

    #[test]
    fn lone_variable() {
        let f = MonotoneFormula::new(1, vec![]).unwrap();
        let (inst, target) = reduce(&f).unwrap();
        assert_eq!(inst.applicant_count(), 2);
        assert_eq!(inst.post_count(), 3);
        assert_eq!(target, Signature(vec![1, 1]));
        assert_eq!(inst.post_quota(PostId(1)), 1);
        assert!(inst.classes().is_empty());
    }

    #[test]
    fn sizes_follow_counts() {
        let f = MonotoneFormula::new(5, vec![[1, 2, 3], [3, 4, 5], [1, 4, 5]]).unwrap();
        let (inst, _) = reduce(&f).unwrap();
        assert_eq!(inst.applicant_count(), 2 * 5 + 6 * 3);
        assert_eq!(inst.post_count(), 3 * 5 + 3);
        assert_eq!(inst.edges().len(), 2 * inst.applicant_count());
        let pt1 = inst.find_post("pt_1").unwrap();
        assert_eq!(inst.post_quota(pt1), 2);
        assert_eq!(inst.classes_of(Vertex::Post(pt1)).count(), 2);
    }

    #[test]
    fn brute_force() {
        let one = MonotoneFormula::new(3, vec![[1, 2, 3]]).unwrap();
        assert_eq!(
            brute_force_1in3(&one).unwrap(),
            Some(vec![true, false, false])
        );
        let empty = MonotoneFormula::new(2, vec![]).unwrap();
        assert!(brute_force_1in3(&empty).unwrap().is_some());
        // each variable sits in three of the four clauses, so a single true
        // variable covers only three clauses and two cover some clause twice
        let all_triples =
            MonotoneFormula::new(4, vec![[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]).unwrap();
        assert_eq!(brute_force_1in3(&all_triples).unwrap(), None);
        let three = MonotoneFormula::new(4, vec![[1, 2, 3], [1, 2, 4], [1, 3, 4]]).unwrap();
        assert_eq!(
            brute_force_1in3(&three).unwrap(),
            Some(vec![true, false, false, false])
        );
        let big = MonotoneFormula::new(21, vec![]).unwrap();
        assert!(matches!(
            brute_force_1in3(&big),
            Err(Error::TooLarge { .. })
        ));
    }
}
