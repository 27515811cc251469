//! Dataset records and their file formats.
//!
//! JSONL holds full records; TSV holds `sentence<TAB>target` for one meaning
//! representation; `.clf` holds clausal DRSs one clause per line with a blank
//! line between records. Prediction files are `id<TAB>prediction`.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::drs::{ClausalDrs, DrsConverter, INLINE_SEPARATOR};
use crate::error::{Error, Result};
use crate::grammar::{realize, tag, DerivationTree, PhenomenonTags};
use crate::lexicon::{Lexicon, Quantifier};
use crate::polarity::{PolarizedToken, Polarizer};
use crate::semantics::{Composer, SemanticsConfig};
use crate::splits::{Partition, Split, Strategy};

/// Meaning representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mr {
    Fol,
    Vf,
    Drs,
}

impl Mr {
    pub const ALL: [Mr; 3] = [Mr::Fol, Mr::Vf, Mr::Drs];

    pub fn name(self) -> &'static str {
        match self {
            Mr::Fol => "fol",
            Mr::Vf => "vf",
            Mr::Drs => "drs",
        }
    }
}

impl fmt::Display for Mr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mr> {
        Mr::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown meaning representation {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub sentence: String,
    pub fol: String,
    pub vf: String,
    pub drs: Vec<String>,
    pub polarity: Vec<PolarizedToken>,
    pub tags: PhenomenonTags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_strategy: Option<Strategy>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub primitive_quantifiers: Vec<Quantifier>,
}

impl DatasetRecord {
    /// Token string for one representation; DRS clauses are joined by ` ; `.
    pub fn target(&self, mr: Mr) -> String {
        match mr {
            Mr::Fol => self.fol.clone(),
            Mr::Vf => self.vf.clone(),
            Mr::Drs => self.drs.join(INLINE_SEPARATOR),
        }
    }
}

/// Derives every representation of a tree from one composition pass.
pub struct RecordBuilder<'a> {
    lex: &'a Lexicon,
    composer: Composer<'a>,
    drs: DrsConverter,
    polarizer: Polarizer,
}

impl<'a> RecordBuilder<'a> {
    pub fn new(lex: &'a Lexicon, cfg: SemanticsConfig) -> RecordBuilder<'a> {
        RecordBuilder {
            lex,
            composer: Composer::new(lex, cfg),
            drs: DrsConverter::for_lexicon(lex),
            polarizer: Polarizer::for_lexicon(lex),
        }
    }

    pub fn build(&self, id: &str, tree: &DerivationTree) -> Result<DatasetRecord> {
        let fol = self.composer.compose_fol(tree)?;
        let vf = self.composer.compose_vf(tree)?;
        let drs = self.drs.clauses(&fol)?;
        Ok(DatasetRecord {
            id: id.to_string(),
            sentence: realize(self.lex, tree),
            fol: fol.serialize(),
            vf: vf.serialize(),
            drs: drs.lines(),
            polarity: self.polarizer.fol(&fol),
            tags: tag(self.lex, tree),
            split: None,
            split_strategy: None,
            primitive_quantifiers: Vec::new(),
        })
    }

    /// Records for a list of trees, ids `{prefix}-{index:06}`; parallel, but
    /// the output order follows the input.
    pub fn build_all(&self, prefix: &str, trees: &[DerivationTree]) -> Result<Vec<DatasetRecord>> {
        trees
            .par_iter()
            .enumerate()
            .map(|(i, t)| self.build(&format!("{prefix}-{i:06}"), t))
            .collect()
    }

    pub fn build_partition(&self, partition: &Partition) -> Result<Vec<DatasetRecord>> {
        let strategy = partition.spec.strategy;
        partition
            .items
            .par_iter()
            .enumerate()
            .map(|(i, item)| {
                let mut r = self.build(&format!("{strategy}-{i:06}"), &item.tree)?;
                r.split = Some(item.split);
                r.split_strategy = Some(strategy);
                r.primitive_quantifiers = partition.spec.primitives.clone();
                Ok(r)
            })
            .collect()
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn check_unique<'r>(ids: impl Iterator<Item = &'r str>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
    }
    Ok(())
}

pub fn write_jsonl(path: &Path, records: &[DatasetRecord]) -> Result<()> {
    check_unique(records.iter().map(|r| r.id.as_str()))?;
    let mut w = create(path)?;
    for r in records {
        let line = serde_json::to_string(r)?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    finish(w, path)
}

pub fn read_jsonl(path: &Path) -> Result<Vec<DatasetRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: DatasetRecord = serde_json::from_str(&line).map_err(|e| Error::ParseLine {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(r);
    }
    check_unique(out.iter().map(|r| r.id.as_str()))?;
    Ok(out)
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `sentence<TAB>target`, no header.
pub fn write_tsv(path: &Path, records: &[DatasetRecord], mr: Mr) -> Result<()> {
    let mut w = create(path)?;
    for r in records {
        writeln!(w, "{}\t{}", one_line(&r.sentence), one_line(&r.target(mr))).map_err(|e| Error::io(path, e))?;
    }
    finish(w, path)
}

/// Clause files: each record's clauses, one per line, after a `%` comment
/// line with its id; records separated by a blank line.
pub fn write_clf(path: &Path, records: &[DatasetRecord]) -> Result<()> {
    let mut w = create(path)?;
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            writeln!(w).map_err(|e| Error::io(path, e))?;
        }
        writeln!(w, "% {} {}", r.id, r.sentence).map_err(|e| Error::io(path, e))?;
        for c in &r.drs {
            writeln!(w, "{c}").map_err(|e| Error::io(path, e))?;
        }
    }
    finish(w, path)
}

/// One line of a prediction file, kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub raw: String,
    /// The line had no tab separator, so the whole line was taken as the id
    /// and the prediction is empty.
    pub malformed: bool,
}

pub fn parse_predictions(text: &str) -> Result<Vec<Prediction>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let p = match line.split_once('\t') {
            Some((id, pred)) => Prediction {
                id: id.trim().to_string(),
                raw: pred.to_string(),
                malformed: false,
            },
            None => Prediction {
                id: line.trim().to_string(),
                raw: String::new(),
                malformed: true,
            },
        };
        out.push(p);
    }
    check_unique(out.iter().map(|p| p.id.as_str()))?;
    Ok(out)
}

pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(&text)
}

pub fn write_predictions(path: &Path, preds: &[(String, String)]) -> Result<()> {
    check_unique(preds.iter().map(|(id, _)| id.as_str()))?;
    let mut w = create(path)?;
    for (id, p) in preds {
        writeln!(w, "{id}\t{}", one_line(p)).map_err(|e| Error::io(path, e))?;
    }
    finish(w, path)
}

/// Gold clauses of a record, parsed back from its stored lines.
pub fn gold_clauses(r: &DatasetRecord) -> Result<ClausalDrs> {
    ClausalDrs::parse(&r.drs.join("\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_sentence;

    fn record(lex: &Lexicon, s: &str, id: &str) -> DatasetRecord {
        RecordBuilder::new(lex, SemanticsConfig::default())
            .build(id, &parse_sentence(lex, s).unwrap())
            .unwrap()
    }

    #[test]
    fn record_fields() {
        let lex = Lexicon::default();
        let r = record(&lex, "all wild dogs ran", "x-1");
        assert_eq!(r.vf, "ALL AND DOG WILD RUN");
        assert_eq!(r.drs.len(), 5);
        assert_eq!(r.target(Mr::Drs).matches(" ; ").count(), 4);
        assert_eq!(r.polarity.len(), 3);
    }

    #[test]
    fn jsonl_round_trip_and_duplicates() {
        let lex = Lexicon::default();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.jsonl");
        let rs = vec![record(&lex, "one tiger ran", "a"), record(&lex, "bob ran", "b")];
        write_jsonl(&p, &rs).unwrap();
        assert_eq!(read_jsonl(&p).unwrap(), rs);
        let dup = vec![rs[0].clone(), rs[0].clone()];
        assert!(matches!(write_jsonl(&p, &dup), Err(Error::DuplicateId(_))));
        write_jsonl(&p, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "");
    }

    #[test]
    fn tsv_line() {
        let lex = Lexicon::default();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.tsv");
        let r = record(&lex, "one tiger ran", "a");
        write_tsv(&p, std::slice::from_ref(&r), Mr::Fol).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), format!("one tiger ran\t{}\n", r.fol));
    }

    #[test]
    fn lenient_predictions() {
        let ps = parse_predictions("a\tALL DOG RUN\nb\t\r\njunk-line\n\n").unwrap();
        assert_eq!(ps.len(), 3);
        assert_eq!(ps[0].raw, "ALL DOG RUN");
        assert_eq!(ps[1].raw, "");
        assert!(ps[2].malformed);
        assert!(matches!(parse_predictions("a\tx\na\ty\n"), Err(Error::DuplicateId(_))));
    }
}
