use std::collections::BTreeMap;
use std::time::Instant;
use zslab_core::engine::PackingEngine;
use zslab_core::symmetry::canonical_form;
use zslab_search::levels::{enumerate_structure_free, SearchBudget, Structure};
use zslab_core::GroupSpec;

#[test]
fn dbg_d3_and_d4_hunt() {
    let spec = GroupSpec::z3_cube();
    let t = Instant::now();
    let d3 = enumerate_structure_free(&spec, &Structure::KDisjoint { k: 3 }, false, None,
        &SearchBudget::default()).unwrap();
    println!("d3 search: D_3={} in {:?}", d3.max_free_size() + 1, t.elapsed());
    let seeds = &d3.levels[13];
    println!("extremal orbits at 13: {}", seeds.len());

    let mut level: Vec<_> = seeds.iter().map(|f| f.representative.clone()).collect();
    for size in 14..=16u64 {
        let t = Instant::now();
        let mut next: BTreeMap<Vec<u8>, zslab_core::multiset::GroupMultiset> = BTreeMap::new();
        let mut eng = PackingEngine::new(&spec, 4).unwrap();
        for rep in &level {
            for x in 0..27u64 {
                let mut cand = rep.clone();
                cand.insert_index(x, 1);
                if eng.has_k_disjoint(&cand, 4).unwrap() {
                    continue;
                }
                let form = canonical_form(&cand).unwrap();
                next.entry(form.representative.canonical_bytes())
                    .or_insert(form.representative);
            }
        }
        level = next.into_values().collect();
        println!("size {size}: {} orbits with packing <= 3 ({:?})", level.len(), t.elapsed());
        if let Some(w) = level.first() {
            println!("  example: {:?}", w);
        }
        if level.is_empty() { break; }
    }
}
