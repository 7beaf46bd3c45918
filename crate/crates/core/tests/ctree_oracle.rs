//! Randomized equivalence of the chunked-set algebra against `BTreeSet`
//! oracles, with a structural audit on every produced tree. The acceptance
//! suite runs the same trials at ten times this volume; this file keeps the
//! developer loop fast.

use std::collections::BTreeSet;

use streamgraph_core::ctree::CTree;
use streamgraph_core::hash64::SplitMix64;

const BS: [u64; 4] = [1, 2, 8, 256];

fn random_set(rng: &mut SplitMix64, max_len: u64, key_space: u64) -> Vec<u64> {
    let len = rng.next_below(max_len + 1);
    (0..len).map(|_| rng.next_below(key_space)).collect()
}

fn checked(t: CTree, want: &BTreeSet<u64>) -> CTree {
    t.audit().unwrap_or_else(|e| panic!("audit failed: {e}"));
    let got = t.collect();
    let want: Vec<u64> = want.iter().copied().collect();
    assert_eq!(got, want, "element set diverged from oracle");
    t
}

#[test]
fn set_algebra_matches_btreeset_oracle() {
    let mut rng = SplitMix64::new(0xfeed);
    for trial in 0..1200u64 {
        let b = BS[(trial % BS.len() as u64) as usize];
        let xs = random_set(&mut rng, 1000, 2500);
        let ys = random_set(&mut rng, 1000, 2500);
        let ox: BTreeSet<u64> = xs.iter().copied().collect();
        let oy: BTreeSet<u64> = ys.iter().copied().collect();

        let tx = checked(CTree::build(&xs, b), &ox);
        let ty = checked(CTree::build(&ys, b), &oy);

        // find on members and random probes
        for &e in xs.iter().take(20) {
            assert!(tx.find(e));
        }
        for _ in 0..20 {
            let probe = rng.next_below(2500);
            assert_eq!(tx.find(probe), ox.contains(&probe));
        }

        // split
        let k = rng.next_below(2500);
        let (l, found, r) = tx.split(k);
        checked(l, &ox.iter().copied().filter(|&e| e < k).collect());
        checked(r, &ox.iter().copied().filter(|&e| e > k).collect());
        assert_eq!(found, ox.contains(&k));

        // union / difference / intersection
        checked(tx.union(&ty).unwrap(), &ox.union(&oy).copied().collect());
        checked(
            tx.difference(&ty).unwrap(),
            &ox.difference(&oy).copied().collect(),
        );
        checked(
            tx.intersection(&ty).unwrap(),
            &ox.intersection(&oy).copied().collect(),
        );

        // multi insert / delete with a fresh unsorted duplicate-laden batch
        let batch = random_set(&mut rng, 300, 2500);
        let ob: BTreeSet<u64> = batch.iter().copied().collect();
        checked(tx.multi_insert(&batch), &ox.union(&ob).copied().collect());
        checked(
            tx.multi_delete(&batch),
            &ox.difference(&ob).copied().collect(),
        );

        // inputs stayed intact
        assert_eq!(tx.collect(), ox.iter().copied().collect::<Vec<_>>());
        assert_eq!(ty.collect(), oy.iter().copied().collect::<Vec<_>>());
    }
}

#[test]
fn union_bc_matches_oracle() {
    let mut rng = SplitMix64::new(0xbc);
    let mut exercised = 0u32;
    for trial in 0..4000u64 {
        let b = BS[(trial % BS.len() as u64) as usize];
        let xs = random_set(&mut rng, 40, 4000);
        let p = CTree::build(&xs, b);
        if p.head_count() > 0 {
            continue; // union_bc wants a headless first operand
        }
        exercised += 1;
        let ys = random_set(&mut rng, 800, 4000);
        let c = CTree::build(&ys, b);
        let want: BTreeSet<u64> = xs.iter().chain(ys.iter()).copied().collect();
        checked(p.union_bc(&c).unwrap(), &want);
    }
    assert!(exercised > 100, "too few headless operands: {exercised}");
}

#[test]
fn canonical_structure_is_a_function_of_the_set() {
    let mut rng = SplitMix64::new(0xca11);
    for &b in &BS {
        let xs = random_set(&mut rng, 1500, 4000);
        let direct = CTree::build(&xs, b);

        // same set reached by a different operation history
        let (half1, half2) = xs.split_at(xs.len() / 2);
        let via_union = CTree::build(half1, b)
            .union(&CTree::build(half2, b))
            .unwrap();

        let noise = random_set(&mut rng, 500, 4000);
        let via_churn = CTree::build(&xs, b).multi_insert(&noise).multi_delete(
            &noise
                .iter()
                .copied()
                .filter(|e| !xs.contains(e))
                .collect::<Vec<_>>(),
        );

        for other in [&via_union, &via_churn] {
            other.audit().unwrap();
            assert_eq!(other.collect(), direct.collect());
            assert_eq!(other.head_count(), direct.head_count());
            assert_eq!(
                other.prefix().map(|p| p.decode().unwrap()),
                direct.prefix().map(|p| p.decode().unwrap())
            );
            let mut a = Vec::new();
            other.for_each_head(&mut |h, t| a.push((h, t.map(|c| c.decode().unwrap()))));
            let mut d = Vec::new();
            direct.for_each_head(&mut |h, t| d.push((h, t.map(|c| c.decode().unwrap()))));
            assert_eq!(a, d);
        }
    }
}

/// Scaled-down run of the head-count statistics (the acceptance suite runs
/// n = 10^6 over five seeds): heads are binomial with p = 1/b, so the count
/// must sit within six standard deviations, and no chunk may stretch past
/// 4 * b * ln n.
#[test]
fn head_statistics_moderate_scale() {
    let n = 200_000u64;
    let b = 256u64;
    let mut rng = SplitMix64::new(0x5eed);
    let xs: Vec<u64> = (0..n).map(|_| rng.next_u64() >> 4).collect();
    let t = CTree::build(&xs, b);
    let distinct = t.size();
    assert!(distinct > n - 32, "60-bit keys should barely collide");

    let expect = distinct as f64 / b as f64;
    let sigma = (distinct as f64 * (1.0 / b as f64) * (1.0 - 1.0 / b as f64)).sqrt();
    let heads = t.head_count() as f64;
    assert!(
        (heads - expect).abs() <= 6.0 * sigma,
        "head count {heads} outside {expect} ± {}",
        6.0 * sigma
    );

    let cap = 4.0 * b as f64 * (distinct as f64).ln();
    let mut max_chunk = t.prefix().map_or(0, |p| p.len());
    t.for_each_head(&mut |_, tail| {
        max_chunk = max_chunk.max(tail.map_or(0, |c| c.len()));
    });
    assert!(
        (max_chunk as f64) <= cap,
        "chunk of {max_chunk} exceeds {cap}"
    );
}
