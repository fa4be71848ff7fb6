//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use adasync::aeps::{aeps_to_pda, normalize_distinct_pushes};
use adasync::aps::build_aps;
use adasync::decide::{decide, lower, solve_special, DecideOptions, Solver};
use adasync::fixtures::{aeps, corpus, recast, run4, run4_document};
use adasync::format::{parse_document, Document};
use adasync::oracle::{
    all_configs, bounded_aeps_run_search, bounded_aps_run_search, bounded_compressed_run_search, bounded_decide, bounded_game_solve, brute_prestar, Bounds,
};
use adasync::pda::{StateId, StateSet};
use adasync::random::{random_aps, random_nps, random_pda, random_targets, rng};
use adasync::reductions::{pull_back, reduce, ReductionTag};
use adasync::sparse::nautomaton::{prestar, NAutomaton};
use adasync::sparse::structured::{enumerate_structured, StructuredTree};
use adasync::sparse::{sparse_empty, SparseOptions};
use adasync::witness::{deserialize_tree, WitnessKind};

type Outcome = Result<String, String>;

fn fixture(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
        .to_str()
        .unwrap()
        .to_string()
}

fn within(t: Instant, limit: u64) -> Result<Duration, String> {
    let e = t.elapsed();
    if e > Duration::from_secs(limit) {
        return Err(format!("took {e:.2?}, limit {limit}s"));
    }
    Ok(e)
}

fn run4_golden() -> Outcome {
    let t = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let w = dir.path().join("run4.tree");
    let o = Command::new(env!("CARGO_BIN_EXE_adasync"))
        .args(["decide", "--variant", "special", &fixture("run4.pda"), "--witness", w.to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    let out = String::from_utf8_lossy(&o.stdout);
    if o.status.code() != Some(0) || !out.starts_with("answer: YES") {
        return Err(format!("decide said {out:?}"));
    }
    let e = within(t, 5)?;
    let inst = run4_document().instance(Some("special")).map_err(|e| e.to_string())?;
    let pda = inst.pda.complete();
    let text = std::fs::read_to_string(&w).map_err(|e| e.to_string())?;
    let tree = deserialize_tree(&pda, &text).map_err(|e| e.to_string())?;
    inst.check(&tree).map_err(|v| format!("witness rejected: {v}"))?;
    Ok(format!("YES in {e:.2?}, witness {} leaves checked", tree.leaf_count()))
}

fn run4_leaf_counts() -> Outcome {
    let t = Instant::now();
    let pda = run4();
    let s4 = pda.state_id("4").unwrap();
    let aps = build_aps(&pda, &pda.all_states(), s4, Some(4), None).map_err(|e| e.to_string())?.aps;
    let four = sparse_empty(&aps, 4, &SparseOptions::default()).map_err(|e| e.to_string())?;
    let leaves = four.run.as_ref().map(|r| r.leaf_count());
    if !four.accepted || leaves != Some(4) {
        return Err(format!("k=4: accepted={} leaves={leaves:?}", four.accepted));
    }
    let three = sparse_empty(&aps, 3, &SparseOptions::default()).map_err(|e| e.to_string())?;
    if three.accepted {
        return Err("k=3 accepted".into());
    }
    let b = Bounds::new(8, 64, 2_000_000).unwrap();
    if bounded_aps_run_search(&aps, Some(3), &b).map_err(|e| e.to_string())?.is_yes() {
        return Err("oracle finds a 3-leaf run".into());
    }
    let e = within(t, 60)?;
    Ok(format!("k=4 YES with 4 leaves, k=3 NO (oracle agrees) in {e:.2?}"))
}

fn class_bound() -> Outcome {
    let mut r = rng(0xC1A55);
    let mut checked = 0usize;
    for i in 0..500 {
        let p = random_pda(&mut r, 5, 2, 3, true).complete();
        let n = p.num_states();
        for mask in 1u32..(1 << n) {
            let s: StateSet = (0..n).filter(|j| mask & (1 << j) != 0).map(StateId::from_index).collect();
            for a in p.letters() {
                for top in p.syms() {
                    let total: usize = p.obs_classes(&s, a, top).iter().map(|c| c.targets.len()).sum();
                    if total > s.len() {
                        return Err(format!("PDA {i}: {total} > {}", s.len()));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("500 PDAs, {checked} (S,a,A) triples, 0 violations"))
}

fn prestar_oracle() -> Outcome {
    let t = Instant::now();
    let mut r = rng(0x9E57A);
    let b = Bounds::new(10, 64, 1_000_000).unwrap();
    let mut points = 0usize;
    for i in 0..200 {
        let nps = random_nps(&mut r, 4, 3, 6);
        let targets = random_targets(&mut r, &nps, 3, 2);
        let list: Vec<_> = targets.iter().cloned().collect();
        let m = prestar(&nps, &NAutomaton::from_configs(nps.num_states, &list));
        let brute = brute_prestar(&nps, &targets, &b).map_err(|e| e.to_string())?;
        for (q, w) in all_configs(nps.num_states, nps.num_syms, nps.bottom, 6) {
            if m.stores(q, &w) != brute.contains(&(q, w.clone())) {
                return Err(format!("NPS {i} disagrees at ({q:?}, {w:?})"));
            }
            points += 1;
        }
    }
    let e = within(t, 60)?;
    Ok(format!("200 NPS, {points} configurations, 0 disagreements in {e:.2?}"))
}

fn reduction_corpus() -> Outcome {
    let b = Bounds::new(8, 64, 400_000).unwrap();
    let docs = corpus();
    let mut checks = 0;
    let mut pulled = 0;
    for (name, doc) in &docs {
        for tag in ReductionTag::ALL {
            let src = recast(doc, tag.source_variant());
            let out = reduce(tag, &src).map_err(|e| format!("{name} {tag}: {e}"))?;
            let a = decide(&src, &DecideOptions::default()).map_err(|e| format!("{name} {tag}: {e}"))?;
            let r = decide(&out.instance, &DecideOptions::default()).map_err(|e| format!("{name} {tag}: {e}"))?;
            let o = bounded_decide(&src, &b).map_err(|e| e.to_string())?.is_yes();
            if a.answer != r.answer || a.answer != o {
                return Err(format!("{name} {tag}: source {} reduced {} oracle {o}", a.answer, r.answer));
            }
            if let Some(w) = &r.witness {
                let back = pull_back(&out, w).map_err(|e| format!("{name} {tag}: pull-back: {e}"))?;
                src.check(&back).map_err(|v| format!("{name} {tag}: pulled-back witness rejected: {v}"))?;
                pulled += 1;
            } else if r.answer {
                return Err(format!("{name} {tag}: YES without witness"));
            }
            checks += 1;
        }
    }
    if docs.len() < 8 {
        return Err(format!("only {} corpus instances", docs.len()));
    }
    Ok(format!(
        "{} instances x {} gadgets = {checks} checks, {pulled} witnesses pulled back",
        docs.len(),
        ReductionTag::ALL.len()
    ))
}

fn compression() -> Outcome {
    let mut r = rng(0xC0111);
    let b = Bounds::new(6, 40, 200_000).unwrap();
    let mut yes = [0usize; 4];
    for i in 0..150 {
        let aps = random_aps(&mut r, 4, 3, 6, 3);
        for k in 1..=3 {
            let full = bounded_aps_run_search(&aps, Some(k), &b).map_err(|e| e.to_string())?.is_yes();
            let comp = bounded_compressed_run_search(&aps, k, &b).map_err(|e| e.to_string())?.is_yes();
            if full != comp {
                return Err(format!("APS {i}, k={k}: run {full}, compressed run {comp}"));
            }
            yes[k] += full as usize;
        }
    }
    Ok(format!("150 APS x k=1..3, 0 disagreements (YES counts {:?})", &yes[1..]))
}

fn solver_agreement() -> Outcome {
    let b = Bounds::new(8, 64, 400_000).unwrap();
    let mut compared = 0;
    for (name, doc) in corpus() {
        if !doc.pda.complete().is_deterministic() {
            continue;
        }
        for v in ["special", "given", "super", "homing", "ada"] {
            let (_, special) = lower(&recast(&doc, v)).map_err(|e| e.to_string())?;
            let pda = special.pda.complete();
            if !pda.is_deterministic() {
                continue;
            }
            let (init, s) = (special.variant.init().unwrap(), special.variant.target().unwrap());
            let opts = |solver| DecideOptions { solver, ..Default::default() };
            let sparse = solve_special(&pda, init, s, &opts(Solver::Sparse)).map_err(|e| e.to_string())?.answer;
            let sat = solve_special(&pda, init, s, &opts(Solver::Saturation)).map_err(|e| e.to_string())?.answer;
            let game = bounded_game_solve(&pda, &special.root(), WitnessKind::SuperSynchroniser(s), &b)
                .map_err(|e| e.to_string())?
                .is_yes();
            if sparse != sat || sparse != game {
                return Err(format!("{name} as {v}: sparse {sparse}, saturation {sat}, game {game}"));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} deterministic instances, sparse = saturation = game"))
}

fn aeps_fixtures() -> Outcome {
    let t = Instant::now();
    let b = Bounds::new(8, 64, 400_000).unwrap();
    let mut neps = 0;
    for name in ["neps_counter", "two_vars", "contradiction", "one_step"] {
        let a = aeps(name);
        if !a.is_neps() {
            continue;
        }
        let red = aeps_to_pda(&normalize_distinct_pushes(&a)).map_err(|e| e.to_string())?;
        if !red.instance.pda.complete().is_deterministic() {
            return Err(format!("{name}: NEPS maps to a nondeterministic PDA"));
        }
        neps += 1;
    }
    if neps == 0 {
        return Err("no NEPS fixture".into());
    }
    let answer = |name: &str| -> Result<(bool, bool), String> {
        let text = std::fs::read_to_string(fixture(&format!("aeps/{name}.aeps"))).map_err(|e| e.to_string())?;
        let Document::Aeps(a) = parse_document(&text).map_err(|e| e.to_string())? else {
            return Err(format!("{name} is not an AEPS"));
        };
        let red = aeps_to_pda(&normalize_distinct_pushes(&a)).map_err(|e| e.to_string())?;
        let d = decide(&red.instance, &DecideOptions::default()).map_err(|e| e.to_string())?;
        let o = bounded_aeps_run_search(&a, &b).map_err(|e| e.to_string())?.is_yes();
        Ok((d.answer, o))
    };
    let two = answer("two_vars")?;
    let contra = answer("contradiction")?;
    if two != (true, true) || contra != (false, false) {
        return Err(format!("two_vars (decide, oracle) = {two:?}, contradiction = {contra:?}"));
    }
    let e = within(t, 30)?;
    Ok(format!(
        "{neps} NEPS fixture(s) deterministic, two_vars YES, contradiction NO, oracle agrees, {e:.2?}"
    ))
}

/// Every tree over `Leaf | Simple(t) | Complex(t, t, ..)` with at most
/// `vertices` vertices and at most `width` children per complex vertex.
fn all_trees(vertices: usize, width: usize) -> Vec<StructuredTree> {
    if vertices == 0 {
        return vec![];
    }
    let mut out = vec![StructuredTree::Leaf];
    for c in all_trees(vertices - 1, width) {
        out.push(StructuredTree::Simple(Box::new(c)));
    }
    for m in 2..=width {
        let mut partial: Vec<(Vec<StructuredTree>, usize)> = vec![(vec![], 1)];
        for _ in 0..m {
            let mut next = Vec::new();
            for (cs, used) in &partial {
                if *used >= vertices {
                    continue;
                }
                for c in all_trees(vertices - used, width) {
                    let v = c.vertex_count();
                    let mut cs = cs.clone();
                    cs.push(c);
                    next.push((cs, used + v));
                }
            }
            partial = next;
        }
        out.extend(partial.into_iter().map(|(cs, _)| StructuredTree::Complex(cs)));
    }
    out
}

fn enumeration() -> Outcome {
    let mut counts = Vec::new();
    for (k, want) in [(1, 2), (2, 10)] {
        let got = enumerate_structured(k);
        if got.len() != want {
            return Err(format!("k={k}: {} trees, want {want}", got.len()));
        }
        if let Some(t) = got.iter().find(|t| !t.is_structured()) {
            return Err(format!("k={k}: {t} breaks the invariant"));
        }
        let brute: BTreeSet<String> = all_trees(4 * k - 2, k)
            .into_iter()
            .filter(|t| t.is_structured() && t.leaf_count() <= k)
            .map(|t| t.to_string())
            .collect();
        let mine: BTreeSet<String> = got.iter().map(|t| t.to_string()).collect();
        if brute != mine {
            return Err(format!("k={k}: grammar brute force gives {brute:?}"));
        }
        counts.push(got.len());
    }
    Ok(format!("k=1: {}, k=2: {} trees, all structured, brute force agrees", counts[0], counts[1]))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("RUN4 golden witness", run4_golden),
        ("RUN4 leaf counts", run4_leaf_counts),
        ("deterministic class bound", class_bound),
        ("pre* against brute force", prestar_oracle),
        ("reduction soundness corpus", reduction_corpus),
        ("compressed runs", compression),
        ("solver cross-agreement", solver_agreement),
        ("AEPS reduction fixtures", aeps_fixtures),
        ("structured tree enumeration", enumeration),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match f() {
            Ok(msg) => println!("PASS {} {name}: {msg} [{:.2?}]", i + 1, t.elapsed()),
            Err(msg) => {
                println!("FAIL {} {name}: {msg} [{:.2?}]", i + 1, t.elapsed());
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
