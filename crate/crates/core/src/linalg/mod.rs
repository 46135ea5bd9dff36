pub mod dense;
pub mod eigen;
pub mod sparse;

pub use dense::DMat;
pub use eigen::symmetric_eigh;
pub use sparse::SpMat;
