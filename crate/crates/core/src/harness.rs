//! Corpus handling: reading pair directories, manufacturing scrambled pairs
//! from seed methods, and batch evaluation with report export.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{self, MatchContext, Tier};
use crate::decomposer::{decompose_pair, DecomposeConfig, DecompositionTrace};
use crate::equivalence::{check_equivalent, seed_for, Oracle, Verdict};
use crate::syntax::{parse_method, print_method, MethodAst, NodePath};

pub const LEFT_FILE: &str = "left.mj";
pub const RIGHT_FILE: &str = "right.mj";
pub const META_FILE: &str = "meta.json";

/// Samples used to validate generated pairs.
pub const CORPUS_SAMPLES: usize = 500;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("corpus {0} contains no pairs")]
    EmptyCorpus(PathBuf),
    #[error("no seed methods in {0}")]
    NoSeeds(PathBuf),
    #[error("seed {0}: {1}")]
    BadSeed(PathBuf, String),
    #[error("{0}: {1}")]
    Json(PathBuf, #[source] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |e| HarnessError::Io(path.to_path_buf(), e)
}

/// One scramble step recorded in a generated pair's metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScrambleOp {
    pub rule_id: String,
    /// The rule that undoes this step.
    pub inverse_id: String,
    pub path: NodePath,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bindings: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMeta {
    pub seed: u64,
    /// File stem of the seed method Right was taken from.
    pub seed_method: String,
    /// Scramble length that was drawn; `ops` may be shorter when too few
    /// rules applied.
    pub k: usize,
    /// Ground truth, in the order applied to Right to obtain Left.
    pub ops: Vec<ScrambleOp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub pair_id: String,
    pub left_path: PathBuf,
    pub right_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<PairMeta>,
}

impl PairRecord {
    pub fn load(&self) -> Result<(MethodAst, MethodAst), String> {
        let read = |p: &Path| -> Result<MethodAst, String> {
            let src = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            parse_method(&src).map_err(|e| format!("{}: {e}", p.display()))
        };
        Ok((read(&self.left_path)?, read(&self.right_path)?))
    }
}

/// Lists the pair directories of a corpus, sorted by id. A directory counts
/// as a pair when it holds both `left.mj` and `right.mj`.
pub fn read_corpus(dir: &Path) -> Result<Vec<PairRecord>, HarnessError> {
    let mut pairs = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let path = entry.path();
        let (left, right) = (path.join(LEFT_FILE), path.join(RIGHT_FILE));
        if !path.is_dir() || !left.is_file() || !right.is_file() {
            continue;
        }
        let meta_path = path.join(META_FILE);
        let meta = if meta_path.is_file() {
            let text = fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
            match serde_json::from_str(&text) {
                Ok(m) => Some(m),
                Err(e) => {
                    log::warn!("{}: ignoring metadata: {e}", meta_path.display());
                    None
                }
            }
        } else {
            None
        };
        pairs.push(PairRecord {
            pair_id: entry.file_name().to_string_lossy().into_owned(),
            left_path: left,
            right_path: right,
            meta,
        });
    }
    if pairs.is_empty() {
        return Err(HarnessError::EmptyCorpus(dir.to_path_buf()));
    }
    pairs.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
    Ok(pairs)
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), HarnessError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(contents).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| HarnessError::Io(path.to_path_buf(), e.error))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Json(path.to_path_buf(), e))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

// ---- generation -------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateConfig {
    /// Upper bound on scramble length; each pair draws k from 1..=k_max.
    pub k_max: usize,
    pub n_pairs: usize,
    pub seed: u64,
    /// Scrambles draw invertible rules from these tiers.
    pub tiers: Vec<Tier>,
    pub samples: usize,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig {
            k_max: 5,
            n_pairs: 200,
            seed: 0,
            tiers: vec![Tier::Detector, Tier::Extended],
            samples: CORPUS_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerateReport {
    pub pairs: Vec<PairRecord>,
    /// Pairs that got no scramble at all, with the reason.
    pub skipped: Vec<(String, String)>,
}

/// Reads every `*.mj` file in `dir`, sorted by file name.
pub fn read_seeds(dir: &Path) -> Result<Vec<(String, MethodAst)>, HarnessError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mj") && p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(HarnessError::NoSeeds(dir.to_path_buf()));
    }
    files
        .into_iter()
        .map(|p| {
            let src = fs::read_to_string(&p).map_err(io_err(&p))?;
            let m = parse_method(&src).map_err(|e| HarnessError::BadSeed(p.clone(), e.to_string()))?;
            let stem = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok((stem, m))
        })
        .collect()
}

/// Applies up to `k` random invertible rules to `right`. Every step must
/// agree with `right` on the oracle's inputs and must reach a method not
/// seen earlier in the scramble.
pub fn scramble<R: Rng>(
    right: &MethodAst,
    k: usize,
    tiers: &[Tier],
    oracle: &Oracle,
    rng: &mut R,
) -> (MethodAst, Vec<ScrambleOp>) {
    let rules: Vec<_> = catalog::rules_in(tiers).into_iter().filter(|r| r.invertible()).collect();
    let mut cur = right.clone();
    let mut seen: HashSet<String> = HashSet::from([print_method(right)]);
    let mut ops = Vec::new();
    let mut attempts = 0;
    while ops.len() < k && attempts < 40 * k.max(1) && !rules.is_empty() {
        attempts += 1;
        let rule = rules[rng.gen_range(0..rules.len())];
        let cands: Vec<_> = MatchContext::new(&cur, None)
            .candidates(rule)
            .into_iter()
            .filter(|(_, m)| !seen.contains(&print_method(m)))
            .collect();
        let Some((site, next)) = cands.choose(rng) else { continue };
        if !oracle.accepts(next) {
            continue;
        }
        seen.insert(print_method(next));
        ops.push(ScrambleOp {
            rule_id: rule.id.to_string(),
            inverse_id: rule.inverse.unwrap_or(rule.id).to_string(),
            path: site.path.clone(),
            bindings: site.bindings.clone(),
        });
        cur = next.clone();
    }
    (cur, ops)
}

fn pair_id(i: usize) -> String {
    format!("p{i:04}")
}

/// Writes `n_pairs` scrambled pairs under `out`. Right is always a seed
/// method; Left is its scramble. Output depends only on the seeds and the
/// config.
pub fn generate_corpus(seeds_dir: &Path, out: &Path, config: &GenerateConfig) -> Result<GenerateReport, HarnessError> {
    let seeds = read_seeds(seeds_dir)?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // Draw every pair's parameters up front so pairs can be built in any order.
    let plans: Vec<(String, usize, usize, u64)> = (0..config.n_pairs)
        .map(|i| {
            let which = rng.gen_range(0..seeds.len());
            let k = if config.k_max == 0 { 0 } else { rng.gen_range(1..=config.k_max) };
            (pair_id(i), which, k, rng.gen())
        })
        .collect();
    let built: Vec<Result<Option<PairRecord>, HarnessError>> = plans
        .par_iter()
        .map(|(id, which, k, pair_seed)| {
            let (stem, right) = &seeds[*which];
            let oracle_seed = seed_for(id, config.seed);
            let oracle = Oracle::new(right, config.samples, oracle_seed)
                .map_err(|e| HarnessError::BadSeed(seeds_dir.join(format!("{stem}.mj")), e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(*pair_seed);
            let (left, ops) = scramble(right, *k, &config.tiers, &oracle, &mut rng);
            if *k > 0 && ops.is_empty() {
                log::warn!("{id}: no scramble applies to seed {stem}; skipped");
                return Ok(None);
            }
            debug_assert!(matches!(
                check_equivalent(&left, right, config.samples, oracle_seed),
                Ok(Verdict::Consistent)
            ));
            let dir = out.join(id);
            let meta = PairMeta {
                seed: *pair_seed,
                seed_method: stem.clone(),
                k: *k,
                ops,
            };
            write_atomic(&dir.join(LEFT_FILE), print_method(&left).as_bytes())?;
            write_atomic(&dir.join(RIGHT_FILE), print_method(right).as_bytes())?;
            write_json(&dir.join(META_FILE), &meta)?;
            Ok(Some(PairRecord {
                pair_id: id.clone(),
                left_path: dir.join(LEFT_FILE),
                right_path: dir.join(RIGHT_FILE),
                meta: Some(meta),
            }))
        })
        .collect();
    let mut report = GenerateReport::default();
    for ((id, which, ..), b) in plans.iter().zip(built) {
        match b? {
            Some(p) => report.pairs.push(p),
            None => report
                .skipped
                .push((id.clone(), format!("no applicable scramble for seed {}", seeds[*which].0))),
        }
    }
    Ok(report)
}

// ---- evaluation -------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub pair_id: String,
    pub sim_after_stage_a: f64,
    pub sim_final: f64,
    pub steps: usize,
    pub fully_decomposed: bool,
}

impl From<&DecompositionTrace> for SummaryRow {
    fn from(t: &DecompositionTrace) -> Self {
        SummaryRow {
            pair_id: t.pair_id.clone(),
            sim_after_stage_a: t.sim_after_stage_a,
            sim_final: t.sim_final,
            steps: t.steps.len(),
            fully_decomposed: t.fully_decomposed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFailure {
    pub pair_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub tier_config: String,
    pub pairs: usize,
    pub mean_sim_after_stage_a: f64,
    pub mean_sim_final: f64,
    pub with_steps: usize,
    pub fully_decomposed: usize,
    pub rows: Vec<SummaryRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<PairFailure>,
}

fn mean(xs: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = xs.len();
    if n == 0 {
        0.0
    } else {
        xs.sum::<f64>() / n as f64
    }
}

impl EvalSummary {
    /// Builds a summary whose aggregates are computed from `rows`, which
    /// are sorted by pair id first.
    pub fn from_rows(tier_config: &str, mut rows: Vec<SummaryRow>, mut failures: Vec<PairFailure>) -> Self {
        rows.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
        failures.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
        EvalSummary {
            tier_config: tier_config.to_string(),
            pairs: rows.len(),
            mean_sim_after_stage_a: mean(rows.iter().map(|r| r.sim_after_stage_a)),
            mean_sim_final: mean(rows.iter().map(|r| r.sim_final)),
            with_steps: rows.iter().filter(|r| r.steps > 0).count(),
            fully_decomposed: rows.iter().filter(|r| r.fully_decomposed).count(),
            rows,
            failures,
        }
    }

    /// Whether the aggregates match a recomputation from the rows.
    pub fn is_consistent(&self) -> bool {
        let again = Self::from_rows(&self.tier_config, self.rows.clone(), self.failures.clone());
        again == *self
    }

    /// `sim_final` values sorted ascending.
    pub fn sorted_sims(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.rows.iter().map(|r| r.sim_final).collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    /// One decomposition per pair for each entry.
    pub configs: Vec<DecomposeConfig>,
    /// Worker threads; 0 uses rayon's default.
    pub jobs: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            configs: vec![DecomposeConfig::detector_only(), DecomposeConfig::default()],
            jobs: 0,
        }
    }
}

impl EvalConfig {
    pub fn with_seed(seed: u64) -> Self {
        let mut c = Self::default();
        for d in &mut c.configs {
            d.seed = seed;
        }
        c
    }
}

/// `pair_id,tier_config,sim_final` rows, ascending by sim within each tier
/// configuration.
pub fn sims_csv(summaries: &[EvalSummary]) -> String {
    let mut out = String::from("pair_id,tier_config,sim_final\n");
    for s in summaries {
        let mut rows: Vec<&SummaryRow> = s.rows.iter().collect();
        rows.sort_by(|a, b| a.sim_final.total_cmp(&b.sim_final).then_with(|| a.pair_id.cmp(&b.pair_id)));
        for r in rows {
            let _ = writeln!(out, "{},{},{}", r.pair_id, s.tier_config, r.sim_final);
        }
    }
    out
}

pub const SUMMARY_FILE: &str = "summary.json";
pub const SIMS_FILE: &str = "sims.csv";
pub const TRACES_DIR: &str = "traces";

/// Decomposes every pair of the corpus under each configuration. Traces go
/// to `out/traces/<tier>/<pair>.json`, with `summary.json` and `sims.csv`
/// next to them. Pairs that fail to load are recorded in the summary.
pub fn eval_corpus(corpus: &Path, out: &Path, config: &EvalConfig) -> Result<Vec<EvalSummary>, HarnessError> {
    let pairs = read_corpus(corpus)?;
    let loaded: Vec<(String, Result<(MethodAst, MethodAst), String>)> =
        pairs.iter().map(|p| (p.pair_id.clone(), p.load())).collect();
    let jobs: Vec<(usize, usize)> = (0..config.configs.len())
        .flat_map(|c| (0..loaded.len()).map(move |p| (c, p)))
        .collect();
    let run = || {
        jobs.par_iter()
            .map(|&(c, p)| {
                let dc = &config.configs[c];
                let (id, methods) = &loaded[p];
                let (left, right) = methods.as_ref().map_err(|e| PairFailure {
                    pair_id: id.clone(),
                    error: e.clone(),
                })?;
                let trace = decompose_pair(
                    id,
                    left,
                    right,
                    &DecomposeConfig {
                        emit_snapshots: true,
                        ..dc.clone()
                    },
                );
                let path = out.join(TRACES_DIR).join(dc.tier_label()).join(format!("{id}.json"));
                write_json(&path, &trace).map_err(|e| PairFailure {
                    pair_id: id.clone(),
                    error: e.to_string(),
                })?;
                Ok(SummaryRow::from(&trace))
            })
            .collect::<Vec<Result<SummaryRow, PairFailure>>>()
    };
    let results = if config.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map(|pool| pool.install(run))
            .unwrap_or_else(|_| run())
    } else {
        run()
    };
    let mut per_config: Vec<(Vec<SummaryRow>, Vec<PairFailure>)> = vec![Default::default(); config.configs.len()];
    for (&(c, _), r) in jobs.iter().zip(results) {
        match r {
            Ok(row) => per_config[c].0.push(row),
            Err(f) => per_config[c].1.push(f),
        }
    }
    let summaries: Vec<EvalSummary> = config
        .configs
        .iter()
        .zip(per_config)
        .map(|(dc, (rows, failures))| EvalSummary::from_rows(dc.tier_label(), rows, failures))
        .collect();
    write_json(&out.join(SUMMARY_FILE), &summaries)?;
    write_atomic(&out.join(SIMS_FILE), sims_csv(&summaries).as_bytes())?;
    Ok(summaries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, sim: f64, steps: usize) -> SummaryRow {
        SummaryRow {
            pair_id: id.into(),
            sim_after_stage_a: 0.0,
            sim_final: sim,
            steps,
            fully_decomposed: sim == 1.0,
        }
    }

    #[test]
    fn mean_of_two_pairs() {
        let s = EvalSummary::from_rows("all", vec![row("b", 0.5, 2), row("a", 1.0, 3)], vec![]);
        assert_eq!(s.mean_sim_final, 0.75);
        assert_eq!(s.fully_decomposed, 1);
        assert_eq!(s.with_steps, 2);
        assert_eq!(s.rows[0].pair_id, "a");
        assert!(s.is_consistent());
    }

    #[test]
    fn csv_is_sorted_by_sim() {
        let s = EvalSummary::from_rows("all", vec![row("a", 1.0, 1), row("b", 0.25, 1), row("c", 0.5, 0)], vec![]);
        assert_eq!(
            sims_csv(&[s]),
            "pair_id,tier_config,sim_final\nb,all,0.25\nc,all,0.5\na,all,1\n"
        );
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_corpus(dir.path()), Err(HarnessError::EmptyCorpus(_))));
    }

    #[test]
    fn de_morgan_scramble() {
        let right = parse_method("boolean f(boolean a, boolean b) { return !(a && b); }").unwrap();
        let oracle = Oracle::new(&right, 50, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (left, ops) = scramble(&right, 1, &[Tier::Extended], &oracle, &mut rng);
        assert_eq!(ops.len(), 1);
        assert!(oracle.accepts(&left));
        let rule = catalog::rule("apply-de-morgans-law").unwrap();
        let site = MatchContext::new(&right, None).candidates(rule);
        assert!(print_method(&site[0].1).contains("!a || !b"));
    }
}
