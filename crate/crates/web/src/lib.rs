//! Browser bindings. Every exported function takes plain text and returns a
//! JSON string, so the page needs no generated types.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use adasync::decide::{decide as run_decide, DecideOptions, Solver};
use adasync::fixtures::{CORPUS, RUN4_TEXT};
use adasync::format::{parse_document, Document};
use adasync::sparse::structured::enumerate_structured;
use adasync::witness::{deserialize_tree, serialize_tree, to_dot};
use adasync::ProblemInstance;

/// Largest `k` the page may ask trees for; there are 1082 up to 4 leaves.
pub const MAX_TREE_K: usize = 4;

#[derive(Debug, Default, Serialize)]
pub struct DecideReport {
    pub error: Option<String>,
    pub answer: Option<bool>,
    pub variant: String,
    pub solver: String,
    pub trace: Vec<String>,
    pub aps_states: usize,
    pub witness: Option<String>,
    pub dot: Option<String>,
    pub note: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub valid: bool,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct TreesReport {
    pub k: usize,
    pub trees: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Example {
    pub name: &'static str,
    pub text: &'static str,
}

fn instance(text: &str, variant: &str) -> Result<ProblemInstance, String> {
    let variant = Some(variant.trim()).filter(|v| !v.is_empty());
    match parse_document(text).map_err(|e| e.to_string())? {
        Document::Pda(d) => d.instance(variant).map_err(|e| e.to_string()),
        Document::Aeps(a) => {
            let a = adasync::aeps::normalize_distinct_pushes(&a);
            Ok(adasync::aeps::aeps_to_pda(&a).map_err(|e| e.to_string())?.instance)
        }
        Document::Aps(_) => Err("APS documents are not supported here; give a PDA or AEPS".into()),
    }
}

fn solver(name: &str) -> Result<Solver, String> {
    match name {
        "" | "auto" => Ok(Solver::Auto),
        "sparse" => Ok(Solver::Sparse),
        "saturation" => Ok(Solver::Saturation),
        _ => Err(format!("unknown solver `{name}`")),
    }
}

pub fn decide_report(text: &str, variant: &str, solver_name: &str) -> DecideReport {
    let run = || -> Result<DecideReport, String> {
        let inst = instance(text, variant)?;
        let opts = DecideOptions {
            solver: solver(solver_name)?,
            ..Default::default()
        };
        let d = run_decide(&inst, &opts).map_err(|e| e.to_string())?;
        let pda = inst.pda.complete();
        Ok(DecideReport {
            error: None,
            answer: Some(d.answer),
            variant: inst.variant.name().into(),
            solver: d.solver.name().into(),
            trace: d
                .trace
                .iter()
                .map(|t| format!("{} -> {} ({} states, {} inputs, {} stack symbols)", t.tag, t.to, t.states, t.inputs, t.syms))
                .collect(),
            aps_states: d.aps_states,
            witness: d.witness.as_ref().map(|w| serialize_tree(&pda, w)),
            dot: d.witness.as_ref().map(|w| to_dot(&pda, w)),
            note: d.pull_back_error.map(|e| e.to_string()),
        })
    };
    run().unwrap_or_else(|e| DecideReport {
        error: Some(e),
        ..Default::default()
    })
}

pub fn check_report(text: &str, witness: &str, variant: &str) -> CheckReport {
    let run = || -> Result<CheckReport, String> {
        let inst = instance(text, variant)?;
        let pda = inst.pda.complete();
        let tree = deserialize_tree(&pda, witness).map_err(|e| format!("witness: {e}"))?;
        let inst = ProblemInstance { pda, ..inst };
        Ok(match inst.check(&tree) {
            Ok(()) => CheckReport {
                valid: true,
                message: format!(
                    "valid {} witness: {} nodes, {} leaves",
                    inst.variant.name(),
                    tree.node_count(),
                    tree.leaf_count()
                ),
            },
            Err(v) => CheckReport {
                valid: false,
                message: v.to_string(),
            },
        })
    };
    run().unwrap_or_else(|message| CheckReport { valid: false, message })
}

pub fn trees_report(k: usize) -> TreesReport {
    let k = k.clamp(1, MAX_TREE_K);
    TreesReport {
        k,
        trees: enumerate_structured(k).iter().map(|t| t.to_string()).collect(),
    }
}

pub fn example_list() -> Vec<Example> {
    let mut v = vec![Example { name: "run4", text: RUN4_TEXT }];
    v.extend(CORPUS.iter().filter(|(n, _)| *n != "run4").map(|&(name, text)| Example { name, text }));
    v
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialise")
}

/// Decide a PDA or AEPS document. `variant` may be empty to use the
/// document's header; `solver` is `auto`, `sparse` or `saturation`.
#[wasm_bindgen]
pub fn decide(text: &str, variant: &str, solver: &str) -> String {
    json(&decide_report(text, variant, solver))
}

#[wasm_bindgen]
pub fn check_witness(text: &str, witness: &str, variant: &str) -> String {
    json(&check_report(text, witness, variant))
}

#[wasm_bindgen]
pub fn structured_trees(k: usize) -> String {
    json(&trees_report(k))
}

#[wasm_bindgen]
pub fn examples() -> String {
    json(&example_list())
}
