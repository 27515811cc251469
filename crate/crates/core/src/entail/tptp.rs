use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use super::{EntailDirection, EntailmentVerdict, Verdict, Witness};
use crate::fol::{Fol, FolTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Axiom,
    Conjecture,
}

impl Role {
    fn as_str(self) -> &'static str {
        match self {
            Role::Axiom => "axiom",
            Role::Conjecture => "conjecture",
        }
    }
}

/// One `fof` annotated formula. Bound variables are upper-cased; unbound
/// terms are written as constants.
pub fn to_tptp(f: &Fol, name: &str, role: Role) -> String {
    let mut out = String::new();
    write_formula(f, &mut Vec::new(), &mut out);
    format!("fof({name}, {}, {out}).", role.as_str())
}

/// Antecedent as axiom, consequent as conjecture, one line each.
pub fn tptp_problem(antecedent: &Fol, consequent: &Fol) -> String {
    format!(
        "{}\n{}\n",
        to_tptp(antecedent, "antecedent", Role::Axiom),
        to_tptp(consequent, "consequent", Role::Conjecture)
    )
}

fn variable(x: &str) -> String {
    let mut cs = x.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

fn write_formula(f: &Fol, bound: &mut Vec<String>, out: &mut String) {
    match f {
        Fol::Atom(p, args) => {
            out.push_str(p);
            if !args.is_empty() {
                let parts: Vec<String> = args
                    .iter()
                    .map(|a| match a {
                        FolTerm::Var(x) if bound.contains(x) => variable(x),
                        other => other.name().to_string(),
                    })
                    .collect();
                out.push('(');
                out.push_str(&parts.join(","));
                out.push(')');
            }
        }
        Fol::Not(b) => {
            out.push_str("~ ");
            write_formula(b, bound, out);
        }
        Fol::And(xs) | Fol::Or(xs) if xs.is_empty() => {
            out.push_str(if matches!(f, Fol::And(_)) { "$true" } else { "$false" })
        }
        Fol::And(xs) | Fol::Or(xs) => {
            let op = if matches!(f, Fol::And(_)) { " & " } else { " | " };
            out.push('(');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(op);
                }
                write_formula(x, bound, out);
            }
            out.push(')');
        }
        Fol::Imp(a, b) => {
            out.push('(');
            write_formula(a, bound, out);
            out.push_str(" => ");
            write_formula(b, bound, out);
            out.push(')');
        }
        Fol::Forall(x, b) | Fol::Exists(x, b) => {
            out.push_str(if matches!(f, Fol::Forall(..)) { "! [" } else { "? [" });
            out.push_str(&variable(x));
            out.push_str("] : ");
            bound.push(x.clone());
            write_formula(b, bound, out);
            bound.pop();
        }
    }
}

/// The word after `SZS status`, if the output has one.
pub fn parse_szs_status(output: &str) -> Option<String> {
    output.lines().find_map(|l| {
        let i = l.find("SZS status ")?;
        l[i + "SZS status ".len()..].split_whitespace().next().map(String::from)
    })
}

fn verdict_for(status: &str) -> Verdict {
    match status {
        "Theorem" | "ContradictoryAxioms" => Verdict::Entails,
        "CounterSatisfiable" => Verdict::NotEntails,
        _ => Verdict::Unknown,
    }
}

/// Runs a prover given as a command template; `{}` in the template is
/// replaced by the problem file path, or the path is appended when there is
/// no placeholder.
#[derive(Debug, Clone)]
pub struct ExternalProver {
    pub template: String,
    pub timeout: Duration,
}

static PROBLEM_COUNTER: AtomicUsize = AtomicUsize::new(0);

impl ExternalProver {
    pub fn new(template: &str, timeout: Duration) -> ExternalProver {
        ExternalProver {
            template: template.to_string(),
            timeout,
        }
    }

    fn program(&self) -> Option<&str> {
        self.template.split_whitespace().next()
    }

    /// Whether the program named by the template can be found.
    pub fn is_available(&self) -> bool {
        let Some(prog) = self.program() else {
            return false;
        };
        if prog.contains('/') {
            return Path::new(prog).is_file();
        }
        std::env::var_os("PATH")
            .map(|paths| std::env::split_paths(&paths).any(|d| d.join(prog).is_file()))
            .unwrap_or(false)
    }

    fn args(&self, problem: &Path) -> Vec<String> {
        let path = problem.to_string_lossy();
        let mut args: Vec<String> = self
            .template
            .split_whitespace()
            .map(|t| t.replace("{}", &path))
            .collect();
        if !self.template.contains("{}") {
            args.push(path.into_owned());
        }
        args
    }

    /// Verdict for `antecedent ⊨ consequent`, with a diagnostic when the
    /// prover could not give one.
    pub fn entails(&self, antecedent: &Fol, consequent: &Fol) -> (Verdict, Witness) {
        let n = PROBLEM_COUNTER.fetch_add(1, Ordering::Relaxed);
        let path: PathBuf = std::env::temp_dir().join(format!("sygns-{}-{n}.p", std::process::id()));
        if let Err(e) = std::fs::write(&path, tptp_problem(antecedent, consequent)) {
            return (Verdict::Unknown, Witness::Note(format!("cannot write problem file: {e}")));
        }
        let result = self.run(&path);
        let _ = std::fs::remove_file(&path);
        match result {
            Ok(output) => match parse_szs_status(&output) {
                Some(status) => (verdict_for(&status), Witness::Note(format!("SZS status {status}"))),
                None => (Verdict::Unknown, Witness::Note("no SZS status in prover output".into())),
            },
            Err(msg) => (Verdict::Unknown, Witness::Note(msg)),
        }
    }

    fn run(&self, problem: &Path) -> std::result::Result<String, String> {
        let args = self.args(problem);
        let Some((prog, rest)) = args.split_first() else {
            return Err("empty prover command".into());
        };
        let mut child = Command::new(prog)
            .args(rest)
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| format!("cannot start {prog}: {e}"))?;
        let mut stdout = child.stdout.take().expect("piped stdout");
        let reader = std::thread::spawn(move || {
            let mut s = String::new();
            let _ = stdout.read_to_string(&mut s);
            s
        });
        let start = Instant::now();
        loop {
            match child.try_wait() {
                Ok(Some(_)) => break,
                Ok(None) if start.elapsed() > self.timeout => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err("prover timed out".into());
                }
                Ok(None) => std::thread::sleep(Duration::from_millis(5)),
                Err(e) => return Err(format!("waiting for prover: {e}")),
            }
        }
        reader.join().map_err(|_| "prover output unreadable".to_string())
    }

    pub fn check(&self, gold: &Fol, pred: &Fol) -> [EntailmentVerdict; 2] {
        let run = |direction, a: &Fol, b: &Fol| {
            let start = Instant::now();
            let (verdict, witness) = self.entails(a, b);
            EntailmentVerdict {
                direction,
                verdict,
                witness,
                elapsed: start.elapsed(),
            }
        };
        [
            run(EntailDirection::GoldToPred, gold, pred),
            run(EntailDirection::PredToGold, pred, gold),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fof_syntax() {
        let f = Fol::parse("exists x1 . ( dog ( x1 ) & run ( x1 ) )").unwrap();
        assert_eq!(to_tptp(&f, "c", Role::Conjecture), "fof(c, conjecture, ? [X1] : (dog(X1) & run(X1))).");
        let g = Fol::parse("- all x1 . ( dog ( x1 ) -> chase ( ann , x1 ) )").unwrap();
        assert_eq!(
            to_tptp(&g, "a", Role::Axiom),
            "fof(a, axiom, ~ ! [X1] : (dog(X1) => chase(ann,X1)))."
        );
    }

    #[test]
    fn status_line() {
        let out = "% Refutation found.\n% SZS status Theorem for problem\n";
        assert_eq!(parse_szs_status(out).as_deref(), Some("Theorem"));
        assert_eq!(verdict_for("CounterSatisfiable"), Verdict::NotEntails);
        assert_eq!(verdict_for("Timeout"), Verdict::Unknown);
        assert_eq!(parse_szs_status("nothing"), None);
    }

    #[test]
    fn missing_binary_is_unknown() {
        let p = ExternalProver::new("/nonexistent/prover {}", Duration::from_secs(1));
        assert!(!p.is_available());
        let f = Fol::parse("dog ( ann )").unwrap();
        assert_eq!(p.entails(&f, &f).0, Verdict::Unknown);
    }

    #[test]
    fn timeout_is_unknown() {
        let p = ExternalProver::new("tail -f {}", Duration::from_millis(100));
        let f = Fol::parse("dog ( ann )").unwrap();
        let (v, w) = p.entails(&f, &f);
        assert_eq!(v, Verdict::Unknown);
        assert_eq!(w, Witness::Note("prover timed out".into()));
    }
}
