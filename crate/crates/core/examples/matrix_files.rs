//! Round-trip assembled matrices through both text formats and strip the
//! fixed DOFs.

use femvqe::fem::{assemble, generate_case, CaseKind};
use femvqe::matrixio::{parse_matrix, partition_free, write_matrix, MatrixFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = generate_case(CaseKind::Beam, 3)?;
    let (k, m) = assemble(&model)?;
    for format in [MatrixFormat::AbaqusMtx, MatrixFormat::MatrixMarket] {
        let text = write_matrix(&k, format);
        let back = parse_matrix(&text)?;
        assert_eq!(back.to_dense(), k.to_dense());
        println!("{format:?}: {} lines, first records:", text.lines().count());
        for line in text.lines().take(4) {
            println!("  {line}");
        }
    }
    let kf = partition_free(&k, &model.bc)?;
    let mf = partition_free(&m, &model.bc)?;
    println!("\n{} DOFs, {} fixed -> free block {}x{}", k.dim(), model.bc.len(), kf.matrix.nrows(), kf.matrix.ncols());
    println!("free labels: {}", kf.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "));
    println!("lumped mass diagonal: {:.4e}", mf.matrix.diagonal().transpose());
    Ok(())
}
