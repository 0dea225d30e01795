//! Temporary timing probe; not part of the suite.

use std::time::Instant;

use segrekit_cli::corpus::{build_corpus, lewy_model};
use segrekit_core::hspm::jet_extract;
use segrekit_core::reflection::{
    full_jet_reconstruct, jet_determination_oracle, jet_extends_to_automorphism,
    JetDeterminationInput, JetDeterminationVerdict,
};

#[test]
#[ignore]
fn timing_probe() {
    let t0 = Instant::now();
    let corpus = build_corpus(8, 0);
    eprintln!("build_corpus(8,0): {:?}", t0.elapsed());

    let jets = corpus.jets["moebius_jets"].jets.clone();
    let model = lewy_model(16);
    let t = Instant::now();
    let verdict = jet_determination_oracle(
        &JetDeterminationInput::BothJets(jets.clone()),
        &model,
        &model,
        8,
    )
    .unwrap();
    eprintln!("oracle K=2 out_cap=8 cap16: {:?}", t.elapsed());
    let map = match verdict {
        JetDeterminationVerdict::Unique(map) => map,
        other => panic!("not unique: {other:?}"),
    };

    let fj_model = lewy_model(20);
    let t = Instant::now();
    let jets4 = jet_extract(&map, 4).unwrap();
    let rebuilt = full_jet_reconstruct(&jets4, &fj_model, &fj_model, 8, 7).unwrap();
    eprintln!("full_jet cap20 out_cap=8: {:?}", t.elapsed());
    drop(rebuilt);

    let t = Instant::now();
    let _ = jet_extends_to_automorphism(&jets, &model, &model, 8, 8).unwrap();
    eprintln!("extension check on clean jets: {:?}", t.elapsed());
}
