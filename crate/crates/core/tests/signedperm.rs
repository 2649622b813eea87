use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recigal::signedperm::*;

fn sp(perm: &[usize], signs: &[i8]) -> SignedPerm {
    SignedPerm::new(perm.to_vec(), signs.to_vec()).unwrap()
}

#[test]
fn invariant_examples() {
    let id = SignedPerm::identity(3);
    let inv = id.invariants();
    assert_eq!((inv.eps1, inv.eps2), (1, 1));
    assert_eq!(inv.cycle_type_x, vec![1; 6]);
    assert_eq!(inv.cycle_type_pairs, vec![1; 3]);

    let flip = sp(&[0, 1, 2], &[-1, 1, 1]);
    let inv = flip.invariants();
    assert_eq!((inv.eps1, inv.eps2), (-1, 1));
    assert_eq!(inv.cycle_type_x, vec![1, 1, 1, 1, 2]);

    let swap = sp(&[1, 0, 2], &[1, 1, 1]);
    let inv = swap.invariants();
    assert_eq!((inv.eps1, inv.eps2), (1, -1));
    assert_eq!(inv.cycle_type_x, vec![1, 1, 2, 2]);

    assert!(SignedPerm::new(vec![0, 0], vec![1, 1]).is_err());
    assert!(SignedPerm::new(vec![0, 1], vec![1, 2]).is_err());
}

#[test]
fn enumeration_sizes() {
    assert_eq!(enumerate_w(1, false).unwrap().len(), 2);
    assert_eq!(enumerate_w(1, true).unwrap().len(), 1);
    assert_eq!(enumerate_w(2, false).unwrap().len(), 8);
    assert_eq!(enumerate_w(2, true).unwrap().len(), 4);
    assert_eq!(enumerate_w(3, false).unwrap().len(), 48);
    for n in 1..=6 {
        let all = enumerate_w(n, false).unwrap();
        let plus = enumerate_w(n, true).unwrap();
        assert_eq!(all.len(), w_order(n, false));
        assert_eq!(plus.len() * 2, all.len());
        assert_eq!(all.iter().filter(|g| g.eps1() == 1).count(), plus.len());
        let mut codes: Vec<u64> = all.iter().map(SignedPerm::code).collect();
        codes.sort_unstable();
        codes.dedup();
        assert_eq!(codes.len(), all.len());
    }
    assert!(enumerate_w(8, false).is_err());
}

#[test]
fn epsilons_are_homomorphisms() {
    for n in 1..=4 {
        let all = enumerate_w(n, false).unwrap();
        for a in &all {
            for b in &all {
                let ab = a.compose(b);
                assert_eq!(ab.eps1(), a.eps1() * b.eps1());
                assert_eq!(ab.eps2(), a.eps2() * b.eps2());
            }
            assert!(a.compose(&a.inverse()).is_identity());
        }
    }
}

#[test]
fn commutator_quotient_has_order_four() {
    for n in 2..=5 {
        let all = enumerate_w(n, false).unwrap();
        let k = all.iter().filter(|g| g.eps1() == 1 && g.eps2() == 1).count();
        assert_eq!(k * 4, all.len());
        // the commutator subgroup is exactly ker ε₁ ∩ ker ε₂
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let comms: Vec<SignedPerm> = (0..40)
            .map(|_| {
                let a = &all[rng.gen_range(0..all.len())];
                let b = &all[rng.gen_range(0..all.len())];
                a.compose(b).compose(&a.inverse()).compose(&b.inverse())
            })
            .collect();
        let c = closure(&comms, W_BUDGET).unwrap();
        assert_eq!(c.len(), k);
    }
}

#[test]
fn brauer_examples() {
    let all = enumerate_w(3, false).unwrap();
    let r = check_brauer_criterion(&all).unwrap();
    let BrauerResult::BigWithWitnesses(ws) = &r else {
        panic!("expected witnesses");
    };
    assert!(ws.verify());

    // ker(ε₁ ε₂) for n = 2
    let ker: Vec<SignedPerm> = enumerate_w(2, false)
        .unwrap()
        .into_iter()
        .filter(|g| g.eps1() * g.eps2() == 1)
        .collect();
    assert_eq!(ker.len(), 4);
    assert_eq!(
        check_brauer_criterion(&ker).unwrap(),
        BrauerResult::Inconclusive {
            missing: vec![WitnessRole::Parity]
        }
    );

    // the diagonal sign subgroup
    for n in 2..=4 {
        let diag: Vec<SignedPerm> = (0..n)
            .map(|i| {
                let mut s = vec![1i8; n];
                s[i] = -1;
                SignedPerm::new((0..n).collect(), s).unwrap()
            })
            .collect();
        match check_brauer_criterion(&diag).unwrap() {
            BrauerResult::Inconclusive { missing } => {
                assert!(missing.contains(&WitnessRole::NCycle))
            }
            _ => panic!("diagonal subgroup is not big"),
        }
    }
    assert!(check_brauer_criterion(&[SignedPerm::identity(1)]).is_err());
}

#[test]
fn full_and_plus_groups_pass_streaming() {
    for n in 2..=5 {
        for plus in [false, true] {
            let g = enumerate_w(n, plus).unwrap();
            assert!(check_brauer_stream(n, &g).unwrap().is_big(), "n={n} plus={plus}");
        }
    }
}

#[test]
fn criterion_soundness_on_random_subgroups() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n in [2usize, 3] {
        let all = enumerate_w(n, false).unwrap();
        let mut bigs = 0;
        for _ in 0..1000 {
            let k = rng.gen_range(1..=3);
            let gens: Vec<SignedPerm> = (0..k).map(|_| all[rng.gen_range(0..all.len())].clone()).collect();
            let r = check_brauer_criterion(&gens).unwrap();
            let sub = closure(&gens, W_BUDGET).unwrap();
            if r.is_big() {
                bigs += 1;
                let full = sub.len() == all.len();
                let plus = sub.len() * 2 == all.len() && sub.iter().all(|g| g.eps1() == 1);
                assert!(full || plus, "n={n} gens={gens:?}");
            }
        }
        assert!(bigs > 0);
    }
}

#[test]
fn class_statistics_examples() {
    let s = class_statistics(1, false).unwrap();
    assert_eq!(s.len(), 2);
    assert!(s.values().all(|v| *v == BigRational::new(BigInt::from(1), BigInt::from(2))));

    let s = class_statistics(2, true).unwrap();
    let total: BigRational = s.values().cloned().sum();
    assert!(total.is_one());
    assert!(s.len() <= 4);

    let s = class_statistics(2, false).unwrap();
    let four: BigRational = s
        .iter()
        .filter(|(k, _)| k.x == vec![4])
        .map(|(_, v)| v.clone())
        .sum();
    assert_eq!(four, BigRational::new(BigInt::from(1), BigInt::from(4)));
    for n in 1..=5 {
        for plus in [false, true] {
            let s = class_statistics(n, plus).unwrap();
            let t: BigRational = s.values().cloned().sum();
            assert!(t.is_one());
            if plus {
                assert!(s.keys().all(|k| k.eps1 == 1));
            }
            assert!(s.values().all(|v| *v > BigRational::zero()));
        }
    }
}
