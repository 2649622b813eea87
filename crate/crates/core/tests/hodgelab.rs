use num_bigint::BigInt;
use recigal::hodgelab::*;

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn known_hodge_diamonds() {
    // quartic K3: h^{2,0} = 1, h^{1,1} = 20
    let t = primitive_hodge(2, 4).unwrap();
    assert_eq!(t.hodge, ints(&[1, 19, 1]));
    assert_eq!(t.big_n, BigInt::from(21));
    assert_eq!(t.signature, BigInt::from(3 - 19));
    assert_eq!((t.b_plus.clone(), t.b_minus.clone()), (BigInt::from(3), BigInt::from(19)));
    // cubic surface: b_2 = 7, signature (1, 6)
    let t = primitive_hodge(2, 3).unwrap();
    assert_eq!(t.hodge, ints(&[0, 6, 0]));
    assert_eq!(t.big_n, BigInt::from(6));
    assert_eq!(t.signature, BigInt::from(-5));
    // quintic surface: p_g = 4, b_2 = 53
    let t = primitive_hodge(2, 5).unwrap();
    assert_eq!(t.hodge, ints(&[4, 44, 4]));
    // cubic fourfold: h^{3,1} = 1, h^{2,2} = 21
    let t = primitive_hodge(4, 3).unwrap();
    assert_eq!(t.hodge, ints(&[0, 1, 20, 1, 0]));
    assert_eq!(t.big_n, BigInt::from(22));
    // sextic surface: p_g = C(5,3) = 10
    assert_eq!(primitive_hodge(2, 6).unwrap().hodge[0], BigInt::from(10));
}

#[test]
fn grid_invariants() {
    for n in [2usize, 4, 6] {
        for d in 3..=9 {
            let t = primitive_hodge(n, d).unwrap();
            let sum: BigInt = t.hodge.iter().sum();
            assert_eq!(sum, t.big_n);
            assert_eq!(&t.b_plus + &t.b_minus, &t.big_n + 1);
            for p in 0..=n {
                assert_eq!(t.hodge[p], t.hodge[n - p], "symmetry n={n} d={d}");
            }
        }
    }
    // (d-1)^{n+1} ≡ (-1)^{n+1} mod d: integral exactly for n even
    for d in 2..=12 {
        for n in 0..=8 {
            assert_eq!(middle_degree(n, d).is_ok(), n % 2 == 0 || d == 2, "n={n} d={d}");
        }
    }
}

#[test]
fn signature_congruence_odd_d() {
    for n in [2usize, 4] {
        for d in [3usize, 5, 7, 9] {
            let s = signature_congruence(n, d).unwrap();
            assert!(s.pass, "n={n} d={d}: {}", s.signature);
            assert!(s.b_minus_even);
        }
    }
    assert!(signature_congruence(2, 4).is_err());
    // the signature itself is still available for even d
    assert_eq!(primitive_hodge(2, 4).unwrap().signature, BigInt::from(-16));
}

#[test]
fn k_field() {
    let k = k_field_hypersurface(9).unwrap();
    assert!(k.is_rational);
    assert_eq!(k.radicand, BigInt::from(9));
    let k = k_field_hypersurface(3).unwrap();
    assert_eq!(k.radicand, BigInt::from(-3));
    assert!(!k.is_rational);
    let k = k_field_hypersurface(5).unwrap();
    assert_eq!(k.radicand, BigInt::from(5));
    assert!(!k.is_rational);
    for d in (3..200).step_by(2) {
        let k = k_field_hypersurface(d).unwrap();
        let r = (d as f64).sqrt().round() as usize;
        assert_eq!(k.is_rational, r * r == d, "d={d}");
    }
    assert!(k_field_hypersurface(4).is_err());
}

#[test]
fn rejects_bad_parameters() {
    assert!(primitive_hodge(3, 4).is_err());
    assert!(primitive_hodge(0, 4).is_err());
    assert!(primitive_hodge(2, 2).is_err());
}
