//! Worked examples on the four-element running example and small matroids,
//! exercised through the public API.

use sandpile_torsor::bby::{self, BbyInstance, Scope};
use sandpile_torsor::io::{parse_graph, parse_matrix};
use sandpile_torsor::matroid::Painting;
use sandpile_torsor::sandpile::{self, canonical_arc_action, ReversalClasses};
use sandpile_torsor::signatures::{
    acyclicity, basis_fourientation, contract_sig, delete_sig, enumerate_signatures, is_acyclic, is_triangulating,
    AcyclicCertificate, SignatureFilter,
};
use sandpile_torsor::{
    Budget, Chain, ChainKind, Fourientation, GraphEdge, Orientation, RegularMatroid, SandpileGroup, Signature,
    SignaturePair, SimpleChain, TuCheck,
};

const FIG1_MATRIX: &str = include_str!("../fixtures/fig1.matrix");
const FIG1_GRAPH: &str = include_str!("../fixtures/fig1.graph");
const FIG1_SIG: &str = include_str!("../fixtures/fig1.sig");

fn fig1() -> RegularMatroid {
    parse_matrix(FIG1_MATRIX).unwrap().matroid(TuCheck::Exhaustive).unwrap()
}

fn fig1_pair(m: &RegularMatroid) -> SignaturePair {
    SignaturePair::parse(m, FIG1_SIG).unwrap()
}

fn chain(text: &str) -> SimpleChain {
    fig1().ground().parse_chain(text).unwrap()
}

fn ori(text: &str) -> Orientation {
    Orientation::parse(text).unwrap()
}

fn sets(m: &RegularMatroid, supports: impl Iterator<Item = sandpile_torsor::ElementSet>) -> Vec<String> {
    supports.map(|s| m.ground().format_set(s)).collect()
}

fn double_fig1() -> RegularMatroid {
    let mut rows = Vec::new();
    for r in [[1, 0, -1, -1], [-1, -1, 0, 0], [0, 1, 1, 1]] {
        rows.push([r.to_vec(), vec![0; 4]].concat());
        rows.push([vec![0; 4], r.to_vec()].concat());
    }
    RegularMatroid::from_matrix(rows).unwrap()
}

#[test]
fn matrix_and_graph_inputs_agree() {
    let m = fig1();
    assert_eq!(m.rank(), 2);
    let g = RegularMatroid::from_graph(&parse_graph(FIG1_GRAPH).unwrap()).unwrap();
    assert_eq!(g.bases(), m.bases());
    assert_eq!(g.signed_circuits(), m.signed_circuits());
    assert_eq!(g.signed_cocircuits(), m.signed_cocircuits());

    let one = RegularMatroid::from_matrix(vec![vec![1]]).unwrap();
    assert_eq!(one.bases().len(), 1);
    let free = RegularMatroid::from_matrix(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
    assert_eq!(free.bases().len(), 1);
    assert!(free.circuits().is_empty());
    let edge = RegularMatroid::from_graph(&[GraphEdge::new("u", "v", None)]).unwrap();
    assert_eq!((edge.len(), edge.rank(), edge.bases().len()), (1, 1, 1));
    let two = RegularMatroid::from_graph(&[GraphEdge::new("a", "b", None), GraphEdge::new("c", "d", None)]).unwrap();
    assert_eq!(two.components().len(), 2);
}

#[test]
fn bases_circuits_and_cocircuits() {
    let m = fig1();
    assert_eq!(
        sets(&m, m.bases().iter().map(|b| b.set())),
        ["f1,f2", "f1,f3", "f1,f4", "f2,f3", "f2,f4"]
    );
    assert_eq!(
        sets(&m, m.circuits().supports().iter().copied()),
        ["f1,f2,f3", "f1,f2,f4", "f3,f4"]
    );
    assert!(m.signed_circuits().contains(&chain("+f1-f2+f3")));
    assert!(m.signed_cocircuits().contains(&chain("-f1-f2")));
    let pair = RegularMatroid::from_matrix(vec![vec![1, 1]]).unwrap();
    assert_eq!(sets(&pair, pair.bases().iter().map(|b| b.set())), ["e0", "e1"]);
}

#[test]
fn fundamental_chains() {
    let m = fig1();
    let g = m.ground();
    let t = m.basis(g.parse_set("f1,f3").unwrap()).unwrap();
    let (c, _) = m.fundamental_circuit(&t, 3).unwrap();
    assert_eq!(g.format_set(c.support()), "f3,f4");
    let (d, _) = m.fundamental_cocircuit(&t, 0).unwrap();
    assert_eq!(g.format_set(d.support()), "f1,f2");
}

#[test]
fn duality_and_minors() {
    let m = fig1();
    let d = m.dual();
    let complements: Vec<_> = m.bases().iter().map(|b| b.set().complement(4)).collect();
    assert!(d.bases().iter().all(|b| complements.contains(&b.set())));
    assert_eq!(d.signed_circuits(), m.signed_cocircuits());
    assert_eq!(d.dual().bases(), m.bases());

    let del = m.delete(3).unwrap();
    assert_eq!(sets(&del, del.circuits().supports().iter().copied()), ["f1,f2,f3"]);
    let con = m.contract(3).unwrap();
    assert!(con.is_loop(2));
    assert!(m.contract(2).unwrap().is_loop(2));
    assert_eq!(
        m.delete(0).unwrap().contract(0).unwrap().bases(),
        m.contract(1).unwrap().delete(0).unwrap().bases()
    );
    assert_eq!(m.components().len(), 1);
    assert_eq!(double_fig1().components().len(), 2);
}

#[test]
fn three_painting_and_decompose() {
    let m = fig1();
    assert_eq!(
        m.circuit_or_cocircuit(&ori("-,-,+,+"), 0),
        Painting::Cocircuit(chain("-f1-f2"))
    );
    assert_eq!(
        m.circuit_or_cocircuit(&ori("-,-,+,+"), 2),
        Painting::Cocircuit(chain("-f1+f3+f4"))
    );
    assert_eq!(
        m.circuit_or_cocircuit(&ori("+,-,+,-"), 2),
        Painting::Circuit(chain("+f3-f4"))
    );

    assert_eq!(
        m.decompose(&Chain::from_coeffs(vec![1, -1, 1, 0]), ChainKind::Circuit)
            .unwrap(),
        [chain("+f1-f2+f3")]
    );
    assert_eq!(
        m.decompose(&Chain::from_coeffs(vec![1, -1, 0, 1]), ChainKind::Circuit)
            .unwrap(),
        [chain("+f1-f2+f4")]
    );
    let p = Chain::from_coeffs(vec![-1, 1, 2, 2]);
    let parts = m.decompose(&p, ChainKind::Cocircuit).unwrap();
    let sum = parts.iter().fold(Chain::zero(4), |acc, c| acc.add(&c.to_chain()));
    assert_eq!(sum, p);
    for c in &parts {
        assert!(m.signed_cocircuits().contains(c));
        assert!(c.support().iter().all(|x| c.coeff(x) * p.coeffs()[x] > 0));
    }
}

#[test]
fn fourientation_examples() {
    let m = fig1();
    let pair = fig1_pair(&m);
    let t = m.basis(m.ground().parse_set("f1,f3").unwrap()).unwrap();
    let fs = basis_fourientation(&m, &t, pair.circuit()).unwrap();
    let fd = basis_fourientation(&m, &t, pair.cocircuit()).unwrap();
    assert_eq!(fs.to_string(), "±,-,±,+");
    assert_eq!(fd.to_string(), "-,±,+,±");
    assert_eq!(fs.meet(&fd).to_string(), "-,-,+,+");
    assert!(chain("+f1-f2+f3").compatible_with_fourientation(&fs));
    assert!(chain("-f1").compatible_with(&ori("-,-,+,+")));
    assert_eq!(
        ori("-,-,+,+").reverse(m.ground().parse_set("f1").unwrap()),
        ori("+,-,+,+")
    );
    assert_eq!(
        ori("+,-,+,-").reverse(m.ground().parse_set("f3,f4").unwrap()),
        ori("+,-,-,+")
    );

    let f = Fourientation::parse("±,∅,+,-").unwrap();
    assert_eq!(f.negate().to_string(), "±,0,-,+");
    assert_eq!(f.complement().to_string(), "0,±,-,+");
    let g = Fourientation::parse("+,+,±,∅").unwrap();
    assert_eq!(g.negate().complement().to_string(), "+,+,0,±");
    let free = RegularMatroid::from_matrix(vec![vec![1, 0], vec![0, 1]]).unwrap();
    let empty = Signature::from_chains(&free, ChainKind::Circuit, []).unwrap();
    assert_eq!(
        basis_fourientation(&free, &free.bases()[0], &empty)
            .unwrap()
            .to_string(),
        "±,±"
    );
}

#[test]
fn signature_verdicts() {
    let m = fig1();
    let pair = fig1_pair(&m);
    assert!(pair.is_triangulating(&m));
    assert!(is_acyclic(pair.circuit()));

    let tau = Signature::from_chains(
        &m,
        ChainKind::Circuit,
        [chain("+f1-f2+f3"), chain("-f1+f2-f4"), chain("-f3+f4")],
    )
    .unwrap();
    let verdict = acyclicity(&tau);
    assert!(!verdict.acyclic);
    assert_eq!(verdict.certificate, AcyclicCertificate::Cycle(vec![1, 1, 1]));
    assert!(verdict.verify(&tau));

    let all: Vec<_> = enumerate_signatures(&m, ChainKind::Circuit, SignatureFilter::All, 1 << 16)
        .unwrap()
        .collect();
    assert_eq!(all.len(), 8);
    let acyclic: Vec<_> = enumerate_signatures(&m, ChainKind::Circuit, SignatureFilter::Acyclic, 1 << 16)
        .unwrap()
        .collect();
    assert!(!acyclic.is_empty() && acyclic.len() < 8);
    assert!(acyclic.iter().all(|s| is_triangulating(&m, s)));

    let free = RegularMatroid::from_matrix(vec![vec![1, 0], vec![0, 1]]).unwrap();
    assert_eq!(
        enumerate_signatures(&free, ChainKind::Circuit, SignatureFilter::All, 16)
            .unwrap()
            .count(),
        1
    );
}

#[test]
fn signature_minors() {
    let m = fig1();
    let pair = fig1_pair(&m);
    let del = m.delete(3).unwrap();
    let sd = delete_sig(&m, pair.circuit(), 3).unwrap();
    assert_eq!(sd.to_text(del.ground()), "{f1,f2,f3}: +f1-f2+f3\n");
    let sdd = delete_sig(&m, pair.cocircuit(), 3).unwrap();
    let mut chains: Vec<String> = sdd.chains().iter().map(|c| del.ground().format_chain(c)).collect();
    chains.sort();
    let mut expected = ["-f1+f3", "-f1-f2", "+f2+f3"].map(String::from).to_vec();
    expected.sort();
    assert_eq!(chains, expected);

    let two = double_fig1();
    let sig = Signature::from_functional(&two, ChainKind::Circuit, &[1, 2, 3, 4, 5, 6, 7, 8]);
    let e = 0;
    let con = two.contract(e).unwrap();
    let sc = contract_sig(&two, &sig, e).unwrap();
    let second: Vec<String> = sig
        .chains()
        .iter()
        .filter(|c| c.support().iter().all(|x| x >= 4))
        .map(|c| c.restrict(e).to_string())
        .collect();
    let kept: Vec<String> = sc
        .chains()
        .iter()
        .filter(|c| c.support().iter().all(|x| x >= 3))
        .map(|c| c.to_string())
        .collect();
    assert_eq!(second, kept);
    assert!(con.len() == 7);
}

#[test]
fn sandpile_group_examples() {
    let m = fig1();
    let g = SandpileGroup::new(&m);
    assert_eq!(g.invariant_factors(), [5]);
    let free = RegularMatroid::from_matrix(vec![vec![1, 0], vec![0, 1]]).unwrap();
    assert_eq!(SandpileGroup::new(&free).order(), 1);
    assert_eq!(SandpileGroup::new(&double_fig1()).order(), 25);

    let classes = ReversalClasses::compute(&m, &Budget::default()).unwrap();
    assert_eq!(classes.len(), 5);
    assert_ne!(classes.class_of(&ori("-,-,+,+")), classes.class_of(&ori("+,-,+,+")));
    let single = RegularMatroid::from_matrix(vec![vec![1]]).unwrap();
    let one = ReversalClasses::compute(&single, &Budget::default()).unwrap();
    assert_eq!((one.len(), one.members(0).len()), (1, 2));
}

#[test]
fn canonical_action_examples() {
    let m = fig1();
    let pair = fig1_pair(&m);
    let mut classes = ReversalClasses::compute(&m, &Budget::default()).unwrap();
    classes.attach(&m, &pair).unwrap();
    let g = m.ground();
    let f1 = g.parse_arc("+f1").unwrap();
    let f3 = g.parse_arc("+f3").unwrap();
    assert_eq!(canonical_arc_action(&m, &classes, f1, &ori("-,-,+,+")), ori("+,-,+,+"));
    assert_eq!(canonical_arc_action(&m, &classes, f3, &ori("-,-,+,+")), ori("+,-,-,+"));
    assert_eq!(classes.representative_of(&ori("+,-,+,-")), ori("+,-,-,+"));
    for c in 0..classes.len() {
        let r = classes.representative(c);
        assert_eq!(classes.representative_of(&r), r);
        assert_eq!(
            classes
                .members(c)
                .iter()
                .filter(|o| sandpile::is_sigma_compatible(&m, &pair, o))
                .count(),
            1
        );
    }
    let group = SandpileGroup::new(&m);
    let o = ori("-,-,+,+");
    assert_eq!(
        sandpile::canonical_action(&m, &group, &classes, &group.identity(), &o),
        o
    );

    let bare = sandpile::arc_action_trace(&m, &classes, f1, &o);
    assert!(bare.is_valid());
    assert_eq!(bare.decomposition, Some(Default::default()));
    let t = sandpile::arc_action_trace(&m, &classes, f3, &o);
    assert!(t.is_valid());
    assert_eq!(t.end, ori("+,-,-,+"));
}

#[test]
fn bby_examples() {
    let m = fig1();
    let pair = fig1_pair(&m);
    let inst = BbyInstance::new(m.clone(), pair, &Budget::default()).unwrap();
    let g = m.ground();
    let t = m.basis(g.parse_set("f1,f3").unwrap()).unwrap();
    let t2 = m.basis(g.parse_set("f2,f3").unwrap()).unwrap();
    assert_eq!(inst.bby_map(&t).unwrap(), ori("-,-,+,+"));
    assert_eq!(inst.bby_map(&t2).unwrap(), ori("+,-,+,+"));
    assert_eq!(inst.bby_inverse(&ori("+,-,+,+")).unwrap(), t2);
    for b in m.bases() {
        assert_eq!(&inst.bby_inverse(&inst.bby_map(b).unwrap()).unwrap(), b);
    }
    let f1 = g.parse_arc("+f1").unwrap();
    let f3 = g.parse_arc("+f3").unwrap();
    assert_eq!(inst.act_arc(f1, &t).unwrap(), t2);
    let image = inst.act_arc(f3, &t).unwrap();
    assert_eq!(inst.bby_map(&image).unwrap(), ori("+,-,-,+"));
    assert!(bby::verify_torsor(&inst).is_ok());

    let scope = Scope {
        arcs: Some(vec![f1]),
        bases: Some(vec![m.basis_index(t.set()).unwrap()]),
        elements: Some(vec![2, 3]),
    };
    let report = bby::verify_consistency(&inst, &scope).unwrap();
    assert!(report.is_ok());
    assert!(report.checks.deletion >= 1);
    assert!(report.checks.contraction >= 1);

    let d = bby::verify_duality(&inst).unwrap();
    assert!(d.is_ok());
    assert_eq!((d.bases_checked, d.arcs_checked), (5, 40));
    let dual = inst.dual().unwrap();
    let back = dual.dual().unwrap();
    assert!((0..5).all(|b| back.bby_map_index(b) == inst.bby_map_index(b)));
}

#[test]
fn two_component_consistency() {
    let m = double_fig1();
    let pair = SignaturePair::new(
        Signature::from_functional(&m, ChainKind::Circuit, &[1, 2, 3, 4, 5, 6, 7, 8]),
        Signature::from_functional(&m, ChainKind::Cocircuit, &[1, 2, 3, 4, 5, 6, 7, 8]),
    )
    .unwrap();
    let inst = BbyInstance::new(m, pair, &Budget::default()).unwrap();
    let report = bby::verify_consistency(&inst, &Scope::default()).unwrap();
    assert!(report.is_ok());
    assert!(report.checks.component > 0);
}

#[test]
fn generating_pairs() {
    let m = fig1();
    let inst = BbyInstance::new(m.clone(), fig1_pair(&m), &Budget::default()).unwrap();
    let group = inst.group();
    let all: Vec<_> = sandpile_torsor::Arc::all(4)
        .flat_map(|a| (0..5).map(move |b| (group.arc(a), b)))
        .collect();
    assert!(bby::check_generating_pairs(&inst, &all).unwrap());
    assert!(!bby::check_generating_pairs(&inst, &[]).unwrap());
}
