//! The three verification suites. Each returns its report section and the
//! tables it owns; nothing here touches the filesystem.

pub mod cotangent;
pub mod laplacian;
pub mod nahm;

use crate::report::SuiteReport;
use crate::tables::Table;

#[derive(Debug, Clone)]
pub struct SuiteOutput {
    pub report: SuiteReport,
    pub tables: Vec<Table>,
}
