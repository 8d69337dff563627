use dirlab_core::discrete::{assemble_euclidean, assemble_gasket, read_triplet_file, write_triplet_file};
use dirlab_core::spectral::{eigensolve, read_eigenfunctions, write_eigenfunctions};
use dirlab_core::{make_domain, Error, GaugeKind, GeneratorScale, Shape, SpaceModel};
use tempfile::TempDir;

#[test]
fn mesh_round_trip() {
    let tmp = TempDir::new().unwrap();
    let d = make_domain(
        SpaceModel::euclidean(2, GeneratorScale::Probabilist),
        Shape::Ball {
            gauge: GaugeKind::EuclideanNorm,
            radius: 1.0,
            center: vec![0.0, 0.0],
        },
    )
    .unwrap();
    for mesh in [assemble_euclidean(&d, 0.125, GeneratorScale::Probabilist).unwrap(), assemble_gasket(3).unwrap()] {
        let path = tmp.path().join("m.txt");
        write_triplet_file(&mesh, &path).unwrap();
        let back = read_triplet_file(&path).unwrap();
        assert_eq!(back.n(), mesh.n());
        assert_eq!(back.nodes, mesh.nodes);
        assert_eq!(back.weights, mesh.weights);
        assert_eq!(back.scale(), mesh.scale());
        for i in 0..mesh.n() {
            for (j, v) in mesh.stiffness.row(i) {
                let a = mesh.operator_entry(i, j);
                assert!((back.operator_entry(i, j) - a).abs() <= 1e-15 * a.abs(), "{i},{j}: {v}");
            }
        }
        let (a, b) = (eigensolve(&mesh, 3).unwrap(), eigensolve(&back, 3).unwrap());
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() <= 1e-12 * x);
        }
    }
}

#[test]
fn eigenfunction_round_trip() {
    let tmp = TempDir::new().unwrap();
    let mesh = assemble_gasket(3).unwrap();
    let sd = eigensolve(&mesh, 4).unwrap();
    let path = tmp.path().join("e.bin");
    write_eigenfunctions(&sd, &path).unwrap();
    let (ev, w, ef) = read_eigenfunctions(&path).unwrap();
    assert_eq!(ev, sd.eigenvalues);
    assert_eq!(w, sd.weights);
    assert_eq!(ef, sd.eigenfunctions);

    let mut bytes = std::fs::read(&path).unwrap();
    bytes.pop();
    std::fs::write(&path, &bytes).unwrap();
    assert!(matches!(read_eigenfunctions(&path), Err(Error::Format(_))));
    std::fs::write(&path, b"nope").unwrap();
    assert!(matches!(read_eigenfunctions(&path), Err(Error::Format(_))));
    assert!(matches!(read_triplet_file(&path), Err(Error::Format(_))));
}
