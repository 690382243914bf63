//! The bundled animal dataset: 101 named rows, 16 features, 7 classes.

use crate::data::{load_dataset, LoadOptions, LoadedData};
use crate::error::Result;

pub const ZOO_CSV: &str = include_str!("../../../fixtures/zoo.csv");

pub fn load() -> Result<LoadedData> {
    load_dataset(ZOO_CSV, None, &LoadOptions { id_column: Some("name".into()) })
}
