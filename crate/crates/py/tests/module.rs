use pyo3::prelude::*;
use pyo3::types::PyDict;

use crowdmind_py::crowdmind_py as extension;

fn with_module(f: impl FnOnce(Python<'_>, &Bound<'_, PyDict>)) {
    pyo3::append_to_inittab!(extension);
    Python::initialize();
    Python::attach(|py| {
        let globals = PyDict::new(py);
        globals.set_item("cm", py.import("crowdmind_py").unwrap()).unwrap();
        f(py, &globals);
    });
}

fn eval<'py>(py: Python<'py>, globals: &Bound<'py, PyDict>, code: &str) -> Bound<'py, PyAny> {
    let code = std::ffi::CString::new(code).unwrap();
    py.eval(&code, Some(globals), None).unwrap()
}

#[test]
fn exposes_mappings_and_scenarios() {
    with_module(|py, g| {
        let lto: (f64, f64) = eval(py, g, "cm.long_term_orientation(80.0)").extract().unwrap();
        assert_eq!(lto, (80.0, 20.0));
        let happy: f64 = eval(py, g, "cm.OceanProfile(extraversion=0.9).emotions()['happiness']")
            .extract()
            .unwrap();
        assert!((happy - 0.7).abs() < 1e-12);
        let n: usize = eval(py, g, "len(cm.generate_scenario('lone-walkers', seed=2)[0])").extract().unwrap();
        assert_eq!(n, 5);
        let same: bool = eval(
            py,
            g,
            "(lambda d: cm.TrackingDataset.parse(d.to_text()).to_text() == d.to_text())(cm.generate_scenario('corridor')[0])",
        )
        .extract()
        .unwrap();
        assert!(same);
        let err = py.eval(c"cm.long_term_orientation(120.0)", Some(g), None).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
    });
}
