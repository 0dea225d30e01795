//! Command-line driver: argument parsing, name resolution across input
//! files and the built-in registry, and report assembly.
//!
//! Exit code contract: 0 when every verdict in the final report passes,
//! 1 when any fails or a name does not resolve, 2 on unusable input
//! (unreadable file, syntax error).
//!
//! Settings precedence: command-line flag, then the `SEGREKIT_SEED`
//! environment variable for the seed, then the first settings block among
//! the input files, then built-in defaults (degree 8, seed 0, bracket
//! bound 8). Name lookup prefers file declarations over the registry.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use segrekit_core::hspm::{
    condition_d_witnesses, hspm_verify, jet_extract, real_slice_check, segre_submersive,
    JetPair, SegrePreservingMap,
};
use segrekit_core::model::{analyze_model, GenericModel};
use segrekit_core::reflection::{
    jet_extends_to_automorphism, partner_from_left, partner_from_right, ExtensionVerdict,
};
use segrekit_core::segre::segre_map;
use segrekit_core::{Result, SegreError};

use crate::corpus::{build_corpus, corpus_report, Corpus};
use crate::dsl::{parse_document_with, DslDocument, DEFAULT_DEGREE};
use crate::report::{analysis_detail, verify_record, CaseReport, CheckRecord, Report};

const DEFAULT_BRACKET_BOUND: u32 = 8;

#[derive(Parser)]
#[command(
    name = "segrekit",
    about = "Exact toolkit for Segre preserving map pairs on formal models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Total-degree truncation cap (default 8, or the files' settings).
    #[arg(long)]
    degree: Option<u32>,
    /// Seed for every randomized probe.
    #[arg(long, env = "SEGREKIT_SEED")]
    seed: Option<u64>,
    /// Depth bound for the bracket-spanning finite type computation.
    #[arg(long)]
    bracket_bound: Option<u32>,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Input files in the declaration DSL.
    files: Vec<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum FromSide {
    /// The plain side (f, g) is known; solve for the tilde side.
    H,
    /// The tilde side (ftilde, gtilde) is known; solve for the plain side.
    Htilde,
    /// Only a finite jet is known; decide extension and rebuild.
    Jets,
}

#[derive(Subcommand)]
enum Command {
    /// Invariants of a model: finite type, nondegeneracy, Levi signature,
    /// Segre rank.
    Analyze {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Preservation residual, submersiveness, witness minors, and the
    /// real-slice test for a map.
    Verify {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Iterated Segre mappings of a model with their exact identities.
    Segre {
        name: String,
        /// Number of blocks in the deepest mapping checked.
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Rebuild a map pair from one side or from a finite jet.
    Reconstruct {
        name: String,
        /// Which part of the pair is taken as known.
        #[arg(long, value_enum)]
        from: FromSide,
        #[command(flatten)]
        common: Common,
    },
    /// Run the complete built-in example suite.
    Corpus {
        #[command(flatten)]
        common: Common,
    },
}

/// Resolved run settings plus every parsed document and the registry.
struct Universe {
    degree: u32,
    seed: u64,
    bracket_bound: u32,
    docs: Vec<DslDocument>,
    corpus: Corpus,
    /// Raw file texts, kept so padded reparses stay possible.
    texts: Vec<String>,
}

fn read_files(files: &[PathBuf]) -> std::result::Result<Vec<String>, String> {
    files
        .iter()
        .map(|p| {
            std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))
        })
        .collect()
}

/// Parses every file at a uniform degree, feeding earlier declarations and
/// the registry to later files as externals.
fn parse_all(
    texts: &[String],
    degree: u32,
    registry_models: &[(String, GenericModel)],
) -> Result<Vec<DslDocument>> {
    let mut externals: Vec<(String, GenericModel)> = registry_models.to_vec();
    let mut docs = Vec::new();
    for text in texts {
        let doc = parse_document_with(text, Some(degree), &externals)?;
        for (name, model) in &doc.models {
            externals.push((name.clone(), model.clone()));
        }
        docs.push(doc);
    }
    Ok(docs)
}

fn build_universe(common: &Common) -> std::result::Result<Universe, String> {
    let texts = read_files(&common.files)?;

    // Settings pass: parse without an override to read each file's own
    // resolved settings.
    let mut degree = common.degree;
    let mut seed = common.seed;
    let mut bracket = common.bracket_bound;
    let mut file_degree: Option<u32> = None;
    for text in &texts {
        let doc = parse_document_with(text, None, &[]).map_err(|e| e.to_string())?;
        file_degree = Some(file_degree.map_or(doc.degree, |d: u32| d.max(doc.degree)));
        if seed.is_none() {
            seed = doc.seed;
        }
        if bracket.is_none() {
            bracket = doc.bracket_bound;
        }
    }
    if degree.is_none() {
        degree = file_degree;
    }
    let degree = degree.unwrap_or(DEFAULT_DEGREE);
    let seed = seed.unwrap_or(0);
    let bracket_bound = bracket.unwrap_or(DEFAULT_BRACKET_BOUND);

    let corpus = build_corpus(degree, seed);
    let registry: Vec<(String, GenericModel)> = corpus
        .models
        .iter()
        .map(|(n, m)| (n.clone(), m.clone()))
        .collect();
    let docs = parse_all(&texts, degree, &registry).map_err(|e| e.to_string())?;
    Ok(Universe {
        degree,
        seed,
        bracket_bound,
        docs,
        corpus,
        texts,
    })
}

/// A resolved map with its endpoint models, wherever the names came from.
struct ResolvedMap {
    map: SegrePreservingMap,
    source: GenericModel,
    target: GenericModel,
}

struct ResolvedJets {
    jets: JetPair,
    source: GenericModel,
    target: GenericModel,
}

impl Universe {
    fn model(&self, name: &str) -> Option<GenericModel> {
        for doc in &self.docs {
            if let Some(m) = doc.model(name) {
                return Some(m.clone());
            }
        }
        self.corpus.models.get(name).cloned()
    }

    fn map(&self, name: &str) -> Option<ResolvedMap> {
        for doc in &self.docs {
            if let Some(decl) = doc.map(name) {
                return Some(ResolvedMap {
                    map: decl.map.clone(),
                    source: self.model(&decl.source)?,
                    target: self.model(&decl.target)?,
                });
            }
        }
        let entry = self.corpus.maps.get(name)?;
        Some(ResolvedMap {
            map: entry.map.clone(),
            source: self.corpus.models.get(&entry.source)?.clone(),
            target: self.corpus.models.get(&entry.target)?.clone(),
        })
    }

    fn jets(&self, name: &str) -> Option<ResolvedJets> {
        for doc in &self.docs {
            if let Some(decl) = doc.jet(name) {
                return Some(ResolvedJets {
                    jets: decl.jets.clone(),
                    source: self.model(&decl.source)?,
                    target: self.model(&decl.target)?,
                });
            }
        }
        let entry = self.corpus.jets.get(name)?;
        Some(ResolvedJets {
            jets: entry.jets.clone(),
            source: self.corpus.models.get(&entry.source)?.clone(),
            target: self.corpus.models.get(&entry.target)?.clone(),
        })
    }

    /// The same universe rebuilt at a padded degree cap; reconstruction
    /// pipelines consume cap headroom beyond the reporting degree.
    fn padded(&self, degree: u32) -> Result<Universe> {
        let corpus = build_corpus(degree, self.seed);
        let registry: Vec<(String, GenericModel)> = corpus
            .models
            .iter()
            .map(|(n, m)| (n.clone(), m.clone()))
            .collect();
        let docs = parse_all(&self.texts, degree, &registry)?;
        Ok(Universe {
            degree,
            seed: self.seed,
            bracket_bound: self.bracket_bound,
            docs,
            corpus,
            texts: self.texts.clone(),
        })
    }
}

fn missing_name_case(kind: &str, name: &str) -> CaseReport {
    CaseReport::new(
        name,
        vec![CheckRecord::fail(
            "resolve",
            format!("no {kind} named {name} among the input files or the registry"),
        )],
    )
}

fn run_analyze(u: &Universe, name: &str) -> CaseReport {
    let Some(model) = u.model(name) else {
        return missing_name_case("model", name);
    };
    let records = match analyze_model(&model, u.bracket_bound, u.seed) {
        Ok(rep) => vec![CheckRecord::pass_detail("analysis", analysis_detail(&rep))],
        Err(err) => vec![CheckRecord::fail("analysis", err.to_string())],
    };
    CaseReport::new(name, records)
}

fn run_verify(u: &Universe, name: &str) -> CaseReport {
    let Some(resolved) = u.map(name) else {
        return missing_name_case("map", name);
    };
    let mut records = Vec::new();
    match hspm_verify(&resolved.map, &resolved.source, &resolved.target) {
        Ok(rep) => records.push(verify_record("preservation", &rep)),
        Err(err) => records.push(CheckRecord::fail("preservation", err.to_string())),
    }
    let sub = segre_submersive(&resolved.map);
    records.push(CheckRecord::pass_detail(
        "submersive",
        format!(
            "{} (ranks {}, {} of required {})",
            sub.submersive, sub.f_rank, sub.ft_rank, sub.required
        ),
    ));
    let witnesses = condition_d_witnesses(&resolved.map);
    let detail = if witnesses.is_empty() {
        "no invertible minor pairs".to_string()
    } else {
        let first = &witnesses[0];
        format!(
            "{} minor pairs; first {:?}/{:?} with determinants {} and {}",
            witnesses.len(),
            first.mu.iter().map(|i| i + 1).collect::<Vec<_>>(),
            first.nu.iter().map(|i| i + 1).collect::<Vec<_>>(),
            first.mu_det,
            first.nu_det
        )
    };
    records.push(CheckRecord::pass_detail("condition-d", detail));
    records.push(CheckRecord::pass_detail(
        "real-slice",
        format!("{}", real_slice_check(&resolved.map)),
    ));
    CaseReport::new(name, records)
}

fn run_segre(u: &Universe, name: &str, order: usize) -> CaseReport {
    let Some(model) = u.model(name) else {
        return missing_name_case("model", name);
    };
    if order < 1 {
        return CaseReport::new(
            name,
            vec![CheckRecord::fail("order", "order must be at least 1")],
        );
    }
    let mut records = Vec::new();
    let v = segre_map(&model, order);
    for (j, comp) in v.components().iter().enumerate() {
        records.push(CheckRecord::pass_detail(
            format!("component-{}", j + 1),
            format!(
                "{} terms, lowest degree {}",
                comp.num_terms(),
                comp.valuation().map_or("none".to_string(), |v| v.to_string())
            ),
        ));
    }
    for l in 1..=order.saturating_sub(1).max(1) {
        let ok = crate::corpus::segre_level_stable(&model, l);
        records.push(CheckRecord::expect(
            format!("stability-level-{l}"),
            ok,
            "zeroing the deepest block did not recover the previous level",
        ));
    }
    let r_sym = order.div_ceil(2).max(1);
    let okay = crate::corpus::segre_symmetric_vanishes(&model, r_sym);
    records.push(CheckRecord::expect(
        format!("symmetric-point-r{r_sym}"),
        okay,
        "symmetric-point pullback did not vanish",
    ));
    CaseReport::new(name, records)
}

fn reconstruct_one_sided(
    u: &Universe,
    name: &str,
    resolved: &ResolvedMap,
    left: bool,
) -> Vec<CheckRecord> {
    let check = if left { "partner-from-left" } else { "partner-from-right" };
    let attempt = |uni: &Universe| -> Result<SegrePreservingMap> {
        let r = uni
            .map(name)
            .ok_or_else(|| SegreError::Precondition(format!("map {name} vanished on reparse")))?;
        if left {
            partner_from_left(r.map.f(), r.map.g(), &r.source, &r.target, u.degree)
        } else {
            partner_from_right(r.map.ft(), r.map.gt(), &r.source, &r.target, u.degree)
        }
    };
    let mut outcome = attempt(u);
    if let Err(SegreError::InsufficientCap { have, need, .. }) = &outcome {
        let pad = u.degree + (need - have);
        match u.padded(pad) {
            Ok(padded) => outcome = attempt(&padded),
            Err(err) => outcome = Err(err),
        }
    }
    let mut records = Vec::new();
    match outcome {
        Ok(rebuilt) => {
            let t = |s: &segrekit_core::series::TruncatedSeries| s.truncate(u.degree);
            let matches = if left {
                rebuilt.ft().iter().map(t).eq(resolved.map.ft().iter().map(t))
                    && rebuilt.gt().iter().map(t).eq(resolved.map.gt().iter().map(t))
            } else {
                rebuilt.f().iter().map(t).eq(resolved.map.f().iter().map(t))
                    && rebuilt.g().iter().map(t).eq(resolved.map.g().iter().map(t))
            };
            records.push(CheckRecord::pass_detail(
                check,
                format!("solved to degree {}", u.degree),
            ));
            records.push(CheckRecord::expect(
                "matches-declaration",
                matches,
                "reconstructed side differs from the declared series",
            ));
        }
        Err(SegreError::NotWellPosed(reason)) => {
            records.push(CheckRecord::fail(check, format!("not well posed: {reason}")));
        }
        Err(err) => records.push(CheckRecord::fail(check, err.to_string())),
    }
    records
}

fn reconstruct_jets(u: &Universe, name: &str) -> Vec<CheckRecord> {
    let Some(_) = u.jets(name) else {
        return vec![CheckRecord::fail(
            "resolve",
            format!("no jet table named {name} among the input files or the registry"),
        )];
    };
    // Transport and determination both consume cap headroom; rebuild the
    // universe wide enough for either route at this reporting degree.
    let pad = 2 * u.degree + 4;
    let padded = match u.padded(pad) {
        Ok(p) => p,
        Err(err) => return vec![CheckRecord::fail("reparse", err.to_string())],
    };
    let Some(resolved) = padded.jets(name) else {
        return vec![CheckRecord::fail("resolve", "jet table vanished on reparse")];
    };
    match jet_extends_to_automorphism(
        &resolved.jets,
        &resolved.source,
        &resolved.target,
        u.degree,
        u.seed,
    ) {
        Ok(ExtensionVerdict::Extends(map)) => {
            let jets_match = jet_extract(&map, resolved.jets.order)
                .map(|j| j.left == resolved.jets.left && j.right == resolved.jets.right)
                .unwrap_or(false);
            vec![
                CheckRecord::pass_detail(
                    "extends",
                    format!("jet extends to a preserving pair at degree {}", u.degree),
                ),
                CheckRecord::expect(
                    "jets-match",
                    jets_match,
                    "reconstruction does not reproduce the input jets",
                ),
            ]
        }
        Ok(ExtensionVerdict::Ambiguous { degree, witness }) => vec![CheckRecord::fail(
            "extends",
            format!("jet does not determine a pair: free direction at degree {degree}: {witness}"),
        )],
        Ok(ExtensionVerdict::DoesNotExtend { reason }) => {
            vec![CheckRecord::fail("extends", reason)]
        }
        Err(err) => vec![CheckRecord::fail("extends", err.to_string())],
    }
}

fn run_reconstruct(u: &Universe, name: &str, from: FromSide) -> CaseReport {
    match from {
        FromSide::H | FromSide::Htilde => {
            let Some(resolved) = u.map(name) else {
                return missing_name_case("map", name);
            };
            let records =
                reconstruct_one_sided(u, name, &resolved, matches!(from, FromSide::H));
            CaseReport::new(name, records)
        }
        FromSide::Jets => CaseReport::new(name, reconstruct_jets(u, name)),
    }
}

fn emit(report: &Report, json: &Option<PathBuf>) -> i32 {
    print!("{}", report.render_text());
    if let Some(path) = json {
        if let Err(err) = std::fs::write(path, report.to_json()) {
            eprintln!("cannot write {}: {err}", path.display());
            return 2;
        }
    }
    if report.all_pass {
        0
    } else {
        1
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn real_main() -> i32 {
    let cli = Cli::parse();
    let (common, case, command_name): (&Common, _, &str) = match &cli.command {
        Command::Analyze { name, common } => (common, CaseKind::Analyze(name.clone()), "analyze"),
        Command::Verify { name, common } => (common, CaseKind::Verify(name.clone()), "verify"),
        Command::Segre { name, order, common } => {
            (common, CaseKind::Segre(name.clone(), *order), "segre")
        }
        Command::Reconstruct { name, from, common } => {
            (common, CaseKind::Reconstruct(name.clone(), *from), "reconstruct")
        }
        Command::Corpus { common } => (common, CaseKind::Corpus, "corpus"),
    };

    let universe = match build_universe(common) {
        Ok(u) => u,
        Err(message) => {
            eprintln!("{message}");
            return 2;
        }
    };

    let report = match case {
        CaseKind::Analyze(name) => Report::new(
            command_name,
            universe.degree,
            universe.seed,
            universe.bracket_bound,
            vec![run_analyze(&universe, &name)],
        ),
        CaseKind::Verify(name) => Report::new(
            command_name,
            universe.degree,
            universe.seed,
            universe.bracket_bound,
            vec![run_verify(&universe, &name)],
        ),
        CaseKind::Segre(name, order) => Report::new(
            command_name,
            universe.degree,
            universe.seed,
            universe.bracket_bound,
            vec![run_segre(&universe, &name, order)],
        ),
        CaseKind::Reconstruct(name, from) => Report::new(
            command_name,
            universe.degree,
            universe.seed,
            universe.bracket_bound,
            vec![run_reconstruct(&universe, &name, from)],
        ),
        CaseKind::Corpus => corpus_report(universe.degree, universe.seed, universe.bracket_bound),
    };
    emit(&report, &common.json)
}

enum CaseKind {
    Analyze(String),
    Verify(String),
    Segre(String, usize),
    Reconstruct(String, FromSide),
    Corpus,
}
