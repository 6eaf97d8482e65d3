use reduced_topos::fixtures::{pauli_x, pauli_z, QubitFixture};
use reduced_topos::interval::DownSet;
use reduced_topos::product::{covering_jbold, BoldSieve, ProductPoint};
use reduced_topos::semantics::{
    daseinize_j, enumerate_j_clopens, enumerate_presheaf_clopens, TruthObject,
};
use reduced_topos::sheaf::{enumerate_sieves, Sieve};
use reduced_topos::{BorelSelection, ComplexMatrix, Context, DensityMatrix, Error, Projection};

#[test]
fn malformed_inputs_are_rejected() {
    let f = QubitFixture::new();
    let p = &f.poset;
    assert!(matches!(
        Sieve::new(p, f.vz, [f.vz]),
        Err(Error::NotASieve(..))
    ));
    assert!(matches!(
        Sieve::new(p, f.vz, [f.vx]),
        Err(Error::NotASieve(..))
    ));
    assert!(matches!(
        Sieve::principal(p, f.vz, f.vx),
        Err(Error::NotIncluded { .. })
    ));
    let a = Sieve::top(p, f.vz);
    let b = Sieve::top(p, f.vx);
    assert!(matches!(a.meet(&b), Err(Error::BaseMismatch(..))));

    assert!(matches!(DownSet::closed(1.5), Err(Error::InvalidLevel(_))));
    assert!(matches!(
        ProductPoint::new(f.vz, -0.1),
        Err(Error::InvalidLevel(_))
    ));
    let pt = ProductPoint::new(f.vz, 0.5).unwrap();
    let other = BoldSieve::top(p, ProductPoint::new(f.vx, 0.5).unwrap());
    assert!(matches!(
        covering_jbold(p, &f.flat, pt, &other),
        Err(Error::BaseMismatch(..))
    ));

    assert!(matches!(
        BorelSelection::interval(1.0, 0.0),
        Err(Error::MalformedInterval { .. })
    ));
    assert!(matches!(
        TruthObject::rho_r(&f.rho0, 2.0),
        Err(Error::InvalidLevel(_))
    ));
    assert!(matches!(p.id_of("nowhere"), Err(Error::UnknownContext(_))));
    assert!(Context::generate(2, &[pauli_x(), pauli_z()]).is_err());
    assert!(DensityMatrix::new(ComplexMatrix::diag(&[2.0, -1.0])).is_err());
    assert!(Projection::new(ComplexMatrix::diag(&[0.5, 1.0])).is_err());

    // δ_j(P_x) with the identity selector is not a ♭_z-sheaf
    let dx = daseinize_j(&f.p_x, &f.identity_selector(), p).unwrap();
    assert!(matches!(
        reduced_topos::product::inject_pi1(p, &f.flat, &dx),
        Err(Error::NotJSheaf(_))
    ));
}

#[test]
fn enumeration_bounds_are_enforced() {
    let f = QubitFixture::new();
    let p = &f.poset;
    assert!(matches!(
        enumerate_sieves(p, f.vz, 1),
        Err(Error::EnumerationTooLarge { .. })
    ));
    assert!(matches!(
        enumerate_presheaf_clopens(p, None, 2),
        Err(Error::EnumerationTooLarge { .. })
    ));
    assert!(matches!(
        enumerate_j_clopens(p, &f.flat, None, 1),
        Err(Error::EnumerationTooLarge { .. })
    ));
    assert_eq!(enumerate_presheaf_clopens(p, None, 20).unwrap().len(), 17);
}
