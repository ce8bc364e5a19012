use sandpile_torsor::bby::{self, BbyInstance, Scope, Status};
use sandpile_torsor::planar::{planar_signature, PlaneGraph};
use sandpile_torsor::sandpile::trace_between;
use sandpile_torsor::signatures::{
    acyclicity, enumerate_signatures, triangulation_witness, AcyclicCertificate, Signature, SignatureFilter,
};
use sandpile_torsor::sweep::{sweep, SweepConfig};
use sandpile_torsor::{Budget, ChainKind, GroundSet, RegularMatroid, Result, SandpileGroup};
use serde_json::{json, Value};

use crate::input::{self, Loaded};
use crate::{exit, BbyCommand, CheckKind, Cli, Command, FilterArg, Format, KindArg, SignatureCommand, VerifyWhat};

/// A rendered command result.
pub struct Output {
    pub json: Value,
    pub table: String,
    pub code: u8,
}

impl Output {
    fn ok(json: Value, table: String) -> Self {
        Output {
            json,
            table,
            code: exit::OK,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => format!("{}\n", serde_json::to_string_pretty(&self.json).expect("serializable")),
            Format::Table => self.table.clone(),
        }
    }
}

fn lines<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().map(|l| l + "\n").collect()
}

pub fn run(cli: &Cli) -> Result<Output> {
    let g = &cli.global;
    let budget = g.budget();
    let load = |path: &str| input::load(path, g.input_format);
    match &cli.command {
        Command::Bases { input } => {
            let m = load(input)?.matroid;
            let bases: Vec<String> = m.bases().iter().map(|b| m.ground().format_set(b.set())).collect();
            Ok(Output::ok(json!(bases), lines(bases.clone())))
        }
        Command::Circuits {
            input,
            signed,
            cocircuits,
        } => {
            let m = load(input)?.matroid;
            let kind = if *cocircuits {
                ChainKind::Cocircuit
            } else {
                ChainKind::Circuit
            };
            let ground = m.ground();
            let items: Vec<String> = if *signed {
                m.family(kind).chains().iter().map(|c| ground.format_chain(c)).collect()
            } else {
                m.family(kind)
                    .supports()
                    .iter()
                    .map(|s| format!("{{{}}}", ground.format_set(*s)))
                    .collect()
            };
            Ok(Output::ok(json!(items), lines(items.clone())))
        }
        Command::Group { input } => {
            let m = load(input)?.matroid;
            let group = SandpileGroup::new(&m);
            let factors = group.invariant_factors().to_vec();
            Ok(Output::ok(
                json!({"invariant_factors": factors, "order": group.order()}),
                format!("invariant_factors: {factors:?}\norder: {}\n", group.order()),
            ))
        }
        Command::Signature(cmd) => signature(cmd, g.input_format, &budget),
        Command::Bby(BbyCommand::Map { input, signature }) => {
            let inst = instance(&load(input)?, signature.as_deref(), &budget)?;
            let m = inst.matroid();
            let rows: Vec<(String, String)> = m
                .bases()
                .iter()
                .enumerate()
                .map(|(b, basis)| (m.ground().format_set(basis.set()), inst.bby_map_index(b).to_string()))
                .collect();
            let json = json!(rows
                .iter()
                .map(|(b, o)| json!({"basis": b, "orientation": o}))
                .collect::<Vec<_>>());
            Ok(Output::ok(json, lines(rows.iter().map(|(b, o)| format!("{b} → {o}")))))
        }
        Command::Act {
            input,
            signature,
            arc,
            basis,
        } => {
            let inst = instance(&load(input)?, signature.as_deref(), &budget)?;
            act(&inst, arc, basis)
        }
        Command::Verify {
            what,
            input,
            signature,
            arc,
            basis,
            element,
        } => {
            let inst = instance(&load(input)?, signature.as_deref(), &budget)?;
            let scope = scope(inst.matroid(), arc, basis, element)?;
            verify(&inst, *what, &scope)
        }
        Command::Sweep {
            max_edges,
            no_r10,
            functional_limit,
        } => {
            let report = sweep(&SweepConfig {
                max_edges: *max_edges,
                include_r10: !no_r10,
                functional_limit: *functional_limit,
                budget,
            })?;
            let mut table = String::from("matroid\t|E|\trank\tbases\tclasses\tgroup\tpairs\tsource\n");
            for r in &report.matroids {
                table += &format!(
                    "{}\t{}\t{}\t{}\t{}\t{:?}\t{}\t{}\n",
                    r.name,
                    r.elements,
                    r.rank,
                    r.bases,
                    r.classes,
                    r.invariant_factors,
                    r.pairs,
                    serde_json::to_value(r.pair_source)
                        .expect("serializable")
                        .as_str()
                        .unwrap_or_default()
                );
            }
            for (check, n) in &report.checked {
                table += &format!(
                    "checked {}: {n}\n",
                    serde_json::to_value(check)
                        .expect("serializable")
                        .as_str()
                        .unwrap_or_default()
                );
            }
            table += &format!("triples_checked: {}\n", report.triples_checked);
            for f in &report.failures {
                table += &format!("FAIL {:?} {} pair {:?}: {}\n", f.check, f.matroid, f.pair, f.detail);
            }
            table += &format!("status: {}\n", status_word(report.status));
            let code = if report.is_ok() { exit::OK } else { exit::VIOLATION };
            Ok(Output {
                json: serde_json::to_value(&report).expect("serializable"),
                table,
                code,
            })
        }
    }
}

fn status_word(status: Status) -> &'static str {
    match status {
        Status::Ok => "ok",
        Status::Violations => "violations",
    }
}

fn instance(loaded: &Loaded, signature: Option<&str>, budget: &Budget) -> Result<BbyInstance> {
    let pair = input::pair(loaded, signature)?;
    BbyInstance::new(loaded.matroid.clone(), pair, budget)
}

fn signature(cmd: &SignatureCommand, format: Option<crate::InputFormat>, budget: &Budget) -> Result<Output> {
    match cmd {
        SignatureCommand::Check { kind, input, signature } => {
            let loaded = input::load(input, format)?;
            let m = &loaded.matroid;
            let pair = input::pair(&loaded, signature.as_deref())?;
            let mut verdict = true;
            let mut details = Vec::new();
            let mut table = String::new();
            for sig in [pair.circuit(), pair.cocircuit()] {
                let (ok, certificate, text) = match kind {
                    CheckKind::Acyclic => acyclic_verdict(m.ground(), sig),
                    CheckKind::Triangulating => triangulating_verdict(m, sig),
                };
                verdict &= ok;
                table += &format!("{}: {ok} ({text})\n", sig.kind());
                details.push(json!({"kind": sig.kind(), "verdict": ok, "certificate": certificate}));
            }
            let name = match kind {
                CheckKind::Acyclic => "acyclic",
                CheckKind::Triangulating => "triangulating",
            };
            Ok(Output::ok(
                json!({"property": name, "verdict": verdict, "halves": details}),
                format!("{verdict}\n{table}"),
            ))
        }
        SignatureCommand::Enumerate { input, kind, filter } => {
            let m = input::load(input, format)?.matroid;
            let kind = match kind {
                KindArg::Circuit => ChainKind::Circuit,
                KindArg::Cocircuit => ChainKind::Cocircuit,
            };
            let filter = match filter {
                FilterArg::All => SignatureFilter::All,
                FilterArg::Triangulating => SignatureFilter::Triangulating,
                FilterArg::Acyclic => SignatureFilter::Acyclic,
            };
            let sigs: Vec<Vec<String>> = enumerate_signatures(&m, kind, filter, budget.max_signatures)?
                .map(|s| s.chains().iter().map(|c| m.ground().format_chain(c)).collect())
                .collect();
            let table = lines(sigs.iter().map(|s| s.join(" ")));
            Ok(Output::ok(json!(sigs), table))
        }
        SignatureCommand::FromPlanar { embedding } => {
            let text = std::fs::read_to_string(embedding)?;
            let planar = planar_signature(&PlaneGraph::from_json(&text)?)?;
            let ground = planar.matroid.ground();
            let chains = |s: &Signature| s.chains().iter().map(|c| ground.format_chain(c)).collect::<Vec<_>>();
            Ok(Output::ok(
                json!({
                    "elements": ground.names(),
                    "circuits": chains(planar.pair.circuit()),
                    "cocircuits": chains(planar.pair.cocircuit()),
                    "acyclic": planar.acyclic,
                    "triangulating": planar.triangulating,
                }),
                planar.pair.to_text(ground),
            ))
        }
    }
}

fn acyclic_verdict(ground: &GroundSet, sig: &Signature) -> (bool, Value, String) {
    let v = acyclicity(sig);
    let text = match &v.certificate {
        AcyclicCertificate::Separating(y) => format!(
            "separating functional {}",
            y.iter()
                .zip(ground.names())
                .map(|(c, n)| format!("{n}={c}"))
                .collect::<Vec<_>>()
                .join(" ")
        ),
        AcyclicCertificate::Cycle(l) => format!(
            "zero combination {}",
            l.iter()
                .zip(sig.chains())
                .filter(|(l, _)| **l > 0)
                .map(|(l, c)| format!("{l}*({})", ground.format_chain(c)))
                .collect::<Vec<_>>()
                .join(" + ")
        ),
    };
    (
        v.acyclic,
        serde_json::to_value(&v.certificate).expect("serializable"),
        text,
    )
}

fn triangulating_verdict(m: &RegularMatroid, sig: &Signature) -> (bool, Value, String) {
    let g = m.ground();
    match triangulation_witness(m, sig) {
        None => (true, Value::Null, "no witness".into()),
        Some(w) => {
            let (b1, b2, c) = (
                g.format_set(w.first.set()),
                g.format_set(w.second.set()),
                g.format_chain(&w.chain),
            );
            let text = format!("{c} compatible with F({{{b1}}}) ∩ -F({{{b2}}})");
            (false, json!({"first": b1, "second": b2, "chain": c}), text)
        }
    }
}

fn act(inst: &BbyInstance, arc: &str, basis: &str) -> Result<Output> {
    let m = inst.matroid();
    let g = m.ground();
    let arc = g.parse_arc(arc)?;
    let start = m.basis(g.parse_set(basis)?)?;
    let image = inst.act_arc(arc, &start)?;
    let (o1, o2) = (inst.bby_map(&start)?, inst.bby_map(&image)?);
    let trace = trace_between(m, arc, &o1, &o2);
    let t = trace.to_json(g);
    let step = |v: &Value| match v["kind"].as_str() {
        Some("none") | None => "none".to_string(),
        Some(k) => format!("{k} {}", v["chain"].as_str().unwrap_or_default()),
    };
    let table = format!(
        "{}\nstart: {o1}\npre: {}\nflip: {}\npost: {}\nend: {o2}\nconditions: {}\n",
        g.format_set(image.set()),
        step(&t["pre"]),
        g.format_arc(arc),
        step(&t["post"]),
        if trace.is_valid() { "hold" } else { "fail" },
    );
    Ok(Output::ok(
        json!({
            "arc": g.format_arc(arc),
            "basis": g.format_set(start.set()),
            "image": g.format_set(image.set()),
            "trace": t,
        }),
        table,
    ))
}

fn scope(m: &RegularMatroid, arcs: &[String], bases: &[String], elements: &[String]) -> Result<Scope> {
    let g = m.ground();
    let opt = |v: Vec<usize>| (!v.is_empty()).then_some(v);
    let arcs = arcs.iter().map(|a| g.parse_arc(a)).collect::<Result<Vec<_>>>()?;
    let bases = bases
        .iter()
        .map(|b| {
            let set = g.parse_set(b)?;
            m.basis_index(set)
                .ok_or_else(|| sandpile_torsor::Error::NotABasis(b.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let elements = elements.iter().map(|e| g.position(e)).collect::<Result<Vec<_>>>()?;
    Ok(Scope {
        arcs: (!arcs.is_empty()).then_some(arcs),
        bases: opt(bases),
        elements: opt(elements),
    })
}

fn verify(inst: &BbyInstance, what: VerifyWhat, scope: &Scope) -> Result<Output> {
    let mut json = serde_json::Map::new();
    let mut table = String::new();
    let mut ok = true;
    if matches!(what, VerifyWhat::Consistency | VerifyWhat::All) {
        let r = bby::verify_consistency(inst, scope)?;
        ok &= r.is_ok();
        json.insert("matroid_hash".into(), json!(r.matroid_hash));
        json.insert("signature_hash".into(), json!(r.signature_hash));
        json.insert("triples_checked".into(), json!(r.triples_checked));
        json.insert("violations".into(), json!(r.violations));
        json.insert(
            "consistency".into(),
            json!({"checks": r.checks, "phrasing_mismatches": r.phrasing_mismatches, "replay": r.replay}),
        );
        table += &format!(
            "matroid_hash: {}\nsignature_hash: {}\ntriples_checked: {}\nchecks: deletion {} contraction {} component {} restriction {}\nphrasing_mismatches: {}\n",
            r.matroid_hash,
            r.signature_hash,
            r.triples_checked,
            r.checks.deletion,
            r.checks.contraction,
            r.checks.component,
            r.checks.restriction,
            r.phrasing_mismatches
        );
        for v in &r.violations {
            table += &format!(
                "violation {:?}: arc {} basis {} element {}: {}\n",
                v.part,
                v.arc.as_deref().unwrap_or("-"),
                v.basis.as_deref().unwrap_or("-"),
                v.element,
                v.detail
            );
        }
    }
    if matches!(what, VerifyWhat::Duality | VerifyWhat::All) {
        let d = bby::verify_duality(inst)?;
        ok &= d.is_ok();
        table += &format!(
            "duality: {} bases, {} arc checks, {} pointwise and {} torsor mismatches\n",
            d.bases_checked,
            d.arcs_checked,
            d.pointwise.len(),
            d.torsor.len()
        );
        json.insert("duality".into(), serde_json::to_value(&d).expect("serializable"));
    }
    if matches!(what, VerifyWhat::Structure | VerifyWhat::All) {
        let s = bby::verify_action_structure(inst);
        ok &= s.is_ok();
        table += &format!(
            "structure: {} traces, {} corollary checks, {} failures\n",
            s.traces_checked,
            s.corollary_checked,
            s.failures.len()
        );
        for f in &s.failures {
            table += &format!("structure failure: {} on {}: {}\n", f.arc, f.basis, f.reason);
        }
        json.insert("structure".into(), serde_json::to_value(&s).expect("serializable"));
    }
    if what == VerifyWhat::All {
        let t = bby::verify_torsor(inst);
        ok &= t.is_ok();
        table += &format!(
            "torsor: |S(M)| {} bases {} classes {} latin square {}\n",
            t.group_order, t.bases, t.classes, t.latin_square
        );
        json.insert("torsor".into(), serde_json::to_value(t).expect("serializable"));
    }
    let status = if ok { Status::Ok } else { Status::Violations };
    json.insert("status".into(), json!(status));
    Ok(Output {
        json: Value::Object(json),
        table: format!("status: {}\n{table}", status_word(status)),
        code: if ok { exit::OK } else { exit::VIOLATION },
    })
}
