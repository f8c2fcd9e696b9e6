use pyo3::prelude::*;

#[pymodule]
fn keylab_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
