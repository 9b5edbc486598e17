use proptest::prelude::*;
use slicegemm::extension::{ext_add, ext_multiply, ext_neg, ext_sub};
use slicegemm::search::{search, verify_program, SearchOptions};
use slicegemm::{
    classical_multiply, m4rm_multiply, BitslicedMatrix, DenseMatrix, ExtFieldSpec, ExtMatrix, Field, FunctionSpec,
    M4rmParams, Ring,
};

const FIELDS: [Field; 6] = [Field::F2, Field::F3, Field::F5, Field::F7, Field::Z4, Field::Z8];

/// Schoolbook product over Z/q, written out here rather than borrowed.
fn naive_product(q: u32, a: &[u32], b: &[u32], m: usize, l: usize, n: usize) -> Vec<u32> {
    let mut c = vec![0u32; m * n];
    for i in 0..m {
        for j in 0..n {
            c[i * n + j] = (0..l).map(|t| a[i * l + t] * b[t * n + j] % q).sum::<u32>() % q;
        }
    }
    c
}

/// Polynomial product reduced by `x^d = -(low[0] + low[1] x + ...)`.
fn naive_ext_mul(spec: &ExtFieldSpec, a: u32, b: u32) -> u32 {
    let p = spec.base.order();
    let (x, y) = (spec.coeffs(a), spec.coeffs(b));
    let d = x.len();
    let mut prod = vec![0u32; 2 * d - 1];
    for i in 0..d {
        for j in 0..d {
            prod[i + j] = (prod[i + j] + x[i] * y[j]) % p;
        }
    }
    let low = spec.defining_low();
    for k in (d..prod.len()).rev() {
        let c = prod[k];
        prod[k] = 0;
        for (i, &li) in low.iter().enumerate() {
            prod[k - d + i] = (prod[k - d + i] + (p - li % p) * c) % p;
        }
    }
    spec.from_coeffs(&prod[..d]).unwrap()
}

fn field() -> impl Strategy<Value = Field> {
    prop::sample::select(FIELDS.to_vec())
}

fn ext_spec() -> impl Strategy<Value = ExtFieldSpec> {
    prop::sample::select(ExtFieldSpec::all())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn m4rm_matches_schoolbook(f in field(), m in 0usize..40, l in 0usize..40, n in 0usize..40, seed: u64) {
        let a = DenseMatrix::random(Ring::Base(f), m, l, seed);
        let b = DenseMatrix::random(Ring::Base(f), l, n, seed ^ 0x55);
        let expect = naive_product(f.order(), a.data(), b.data(), m, l, n);
        let (ba, bb) = (BitslicedMatrix::from_dense(&a).unwrap(), BitslicedMatrix::from_dense(&b).unwrap());
        let c = m4rm_multiply(&ba, &bb, M4rmParams::default()).unwrap();
        prop_assert!(c.is_valid());
        prop_assert_eq!(c.to_dense().data().to_vec(), expect.clone());
        prop_assert_eq!(classical_multiply(&ba, &bb).unwrap().to_dense().data().to_vec(), expect);
    }

    #[test]
    fn m4rm_result_independent_of_k(f in field(), m in 1usize..30, l in 1usize..70, n in 1usize..70, seed: u64) {
        let a = BitslicedMatrix::random(f, m, l, seed).unwrap();
        let b = BitslicedMatrix::random(f, l, n, seed + 1).unwrap();
        let base = m4rm_multiply(&a, &b, M4rmParams::with_k(1)).unwrap().to_dense();
        for k in 2..=8 {
            let c = m4rm_multiply(&a, &b, M4rmParams::with_k(k)).unwrap();
            prop_assert_eq!(c.to_dense(), base.clone(), "k={}", k);
        }
    }

    #[test]
    fn elementwise_laws(f in field(), m in 1usize..6, n in 1usize..140, seed: u64, c in 0u32..8) {
        let q = f.order();
        let a = BitslicedMatrix::random(f, m, n, seed).unwrap();
        let b = BitslicedMatrix::random(f, m, n, seed + 7).unwrap();
        let (da, db) = (a.to_dense(), b.to_dense());
        let sum = a.add(&b).unwrap();
        let diff = a.sub(&b).unwrap();
        let neg = a.neg();
        let scaled = a.scalar_mul(c % q).unwrap();
        for (s, out) in [&sum, &diff, &neg, &scaled].into_iter().enumerate() {
            prop_assert!(out.is_valid() && out.padding_is_zero(), "op {}", s);
        }
        let (ds, dd, dn, dc) = (sum.to_dense(), diff.to_dense(), neg.to_dense(), scaled.to_dense());
        for i in 0..da.data().len() {
            let (x, y) = (da.data()[i], db.data()[i]);
            prop_assert_eq!(ds.data()[i], (x + y) % q);
            prop_assert_eq!(dd.data()[i], (x + q - y) % q);
            prop_assert_eq!(dn.data()[i], (q - x) % q);
            prop_assert_eq!(dc.data()[i], x * (c % q) % q);
        }
        prop_assert!(diff.add(&b).unwrap().equals(&a));
    }

    #[test]
    fn dense_text_roundtrip(f in field(), m in 0usize..8, n in 0usize..8, seed: u64) {
        let a = DenseMatrix::random(Ring::Base(f), m, n, seed);
        let back: DenseMatrix = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn ext_text_roundtrip(spec in ext_spec(), m in 1usize..5, n in 1usize..5, seed: u64) {
        let a = DenseMatrix::random(Ring::Ext(spec), m, n, seed);
        let back: DenseMatrix = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn oracle_ext_mul_matches_polynomials(spec in ext_spec(), a in 0u32..125, b in 0u32..125) {
        let ring = Ring::Ext(spec.clone());
        let (a, b) = (a % spec.order(), b % spec.order());
        prop_assert_eq!(ring.mul(a, b), naive_ext_mul(&spec, a, b));
    }

    #[test]
    fn ext_multiply_matches_oracle(spec in ext_spec(), m in 1usize..20, l in 1usize..20, n in 1usize..20, seed: u64) {
        let a = ExtMatrix::random(spec.clone(), m, l, seed).unwrap();
        let b = ExtMatrix::random(spec.clone(), l, n, seed + 3).unwrap();
        let c = ext_multiply(&a, &b, M4rmParams::default()).unwrap();
        let expect = a.to_dense().multiply(&b.to_dense()).unwrap();
        prop_assert_eq!(c.to_dense(), expect);
    }

    #[test]
    fn ext_additive_group(spec in ext_spec(), m in 1usize..6, n in 1usize..70, seed: u64) {
        let a = ExtMatrix::random(spec.clone(), m, n, seed).unwrap();
        let b = ExtMatrix::random(spec, m, n, seed + 1).unwrap();
        let s = ext_add(&a, &b).unwrap();
        prop_assert!(ext_sub(&s, &b).unwrap().equals(&a));
        let z = ext_add(&a, &ext_neg(&a)).unwrap();
        prop_assert!(z.to_dense().data().iter().all(|&v| v == 0));
    }

    #[test]
    fn oracle_distributes(f in field(), n in 1usize..8, seed: u64) {
        let r = Ring::Base(f);
        let a = DenseMatrix::random(r.clone(), n, n, seed);
        let b = DenseMatrix::random(r.clone(), n, n, seed + 1);
        let c = DenseMatrix::random(r, n, n, seed + 2);
        let lhs = a.multiply(&b.add(&c).unwrap()).unwrap();
        let rhs = a.multiply(&b).unwrap().add(&a.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn searched_programs_verify() {
    for (name, len) in [
        ("xor2", 1),
        ("f3-neg", 1),
        ("z4-add", 4),
        ("f5-double", 2),
        ("z8-neg", 3),
    ] {
        let spec = FunctionSpec::builtin(name).unwrap();
        let out = search(&spec, SearchOptions { max_len: 6, threads: 1 }).unwrap();
        let prog = out.program.unwrap_or_else(|| panic!("{name}: none"));
        assert_eq!(prog.len(), len, "{name}");
        assert!(verify_program(&prog, &spec), "{name}");
        assert_eq!(out.exhausted, (0..len).collect::<Vec<_>>(), "{name}");
    }
}

#[test]
fn identity_is_neutral_for_every_field() {
    for f in FIELDS {
        let a = BitslicedMatrix::random(f, 33, 70, 9).unwrap();
        let i = BitslicedMatrix::identity(f, 70).unwrap();
        let c = m4rm_multiply(&a, &i, M4rmParams::default()).unwrap();
        assert_eq!(c.to_dense(), a.to_dense(), "{f}");
    }
    for spec in ExtFieldSpec::all() {
        let a = ExtMatrix::random(spec.clone(), 9, 9, 4).unwrap();
        let i = ExtMatrix::identity(spec, 9).unwrap();
        assert!(ext_multiply(&i, &a, M4rmParams::default()).unwrap().equals(&a));
    }
}
