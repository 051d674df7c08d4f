//! Python bindings: a `Tree` class wrapping a signed tree and its main invariants.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use arbora::blocks::BuildingSet;
use arbora::{complex, fan, flip_order, geometry, minkowski, spine};
use arbora::{SignedTree, Spine};

create_exception!(pyarbora, ArboraError, PyException);

fn err(e: arbora::Error) -> PyErr {
    ArboraError::new_err(e.to_string())
}

const DEFAULT_MAX_NU: usize = 10;

/// A signed tree. Vertex ids are strings; signs are "-" or "+".
#[pyclass(name = "Tree", module = "pyarbora", skip_from_py_object)]
pub struct PyTree {
    inner: SignedTree,
}

type Arcs = Vec<(Vec<String>, Vec<String>)>;

fn spine_arcs(t: &SignedTree, s: &Spine) -> Arcs {
    s.arcs()
        .iter()
        .map(|&(a, b)| (t.labels(s.labels()[a]), t.labels(s.labels()[b])))
        .collect()
}

impl PyTree {
    fn order(&self, ids: &[String]) -> PyResult<Vec<usize>> {
        fan::parse_order(&self.inner, &ids.join(",")).map_err(err)
    }
}

#[pymethods]
impl PyTree {
    /// `vertices` is a list of `(id, sign)` pairs, `edges` a list of id pairs.
    #[new]
    fn new(vertices: Vec<(String, String)>, edges: Vec<(String, String)>) -> PyResult<Self> {
        let mut vs = Vec::new();
        for (id, sign) in &vertices {
            let c = match sign.as_str() {
                "-" => '-',
                "+" => '+',
                other => return Err(ArboraError::new_err(format!("bad sign {:?}", other))),
            };
            vs.push((id.as_str(), c));
        }
        let es: Vec<(&str, &str)> = edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let inner = SignedTree::from_spec(&vs, &es).map_err(err)?;
        Ok(PyTree { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyTree {
            inner: SignedTree::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn nu(&self) -> usize {
        self.inner.nu()
    }

    #[getter]
    fn ids(&self) -> Vec<String> {
        self.inner.ids().iter().map(|v| v.to_string()).collect()
    }

    /// Relevant building blocks in canonical order.
    fn blocks(&self) -> Vec<Vec<String>> {
        BuildingSet::new(&self.inner)
            .blocks
            .iter()
            .map(|&b| self.inner.labels(b))
            .collect()
    }

    fn is_block(&self, subset: Vec<String>) -> PyResult<bool> {
        let s = self.inner.set_of(&subset).map_err(err)?;
        Ok(arbora::blocks::is_block(&self.inner, s))
    }

    /// Face numbers of the nested complex by cardinality.
    fn f_vector(&self) -> Vec<u64> {
        complex::complex_stats(&self.inner).f_complex
    }

    /// Maximal spines as lists of arcs between node labels.
    fn spines(&self) -> Vec<Arcs> {
        spine::enumerate_maximal_spines(&self.inner)
            .iter()
            .map(|s| spine_arcs(&self.inner, s))
            .collect()
    }

    fn kappa(&self, order: Vec<String>) -> PyResult<Arcs> {
        let o = self.order(&order)?;
        let s = fan::kappa(&self.inner, &o).map_err(err)?;
        Ok(spine_arcs(&self.inner, &s))
    }

    /// `(vertices, facets, certified)`: vertex coordinates in id order,
    /// facets as `(support, rhs)` for `Σ x ≥ rhs`.
    #[pyo3(signature = (max_nu = DEFAULT_MAX_NU))]
    fn polytope(&self, max_nu: usize) -> PyResult<(Vec<Vec<i64>>, Vec<(Vec<String>, i64)>, bool)> {
        let p = geometry::realize_polytope(&self.inner, max_nu).map_err(err)?;
        let vertices = p.vertices.iter().map(|(_, x)| x.standard_coords(&self.inner)).collect();
        let facets = p
            .facets
            .iter()
            .map(|(_, h)| (self.inner.labels(h.support), h.rhs))
            .collect();
        Ok((vertices, facets, p.certificate.is_pass()))
    }

    fn verify_realization(&self) -> bool {
        geometry::verify_realization(&self.inner).is_pass()
    }

    fn tight_rhs(&self, subset: Vec<String>) -> PyResult<i64> {
        let s = self.inner.set_of(&subset).map_err(err)?;
        minkowski::tight_rhs(&self.inner, s).map_err(err)
    }

    /// Minkowski coefficients keyed by comma-joined subsets.
    #[pyo3(signature = (max_nu = 7))]
    fn minkowski(&self, max_nu: usize) -> PyResult<BTreeMap<String, i64>> {
        let table = minkowski::minkowski_coefficients(&self.inner, max_nu).map_err(err)?;
        Ok(table
            .subsets
            .iter()
            .zip(&table.y)
            .map(|(&u, &y)| (self.inner.key(u), y))
            .collect())
    }

    /// Barycenter as `(numerator, denominator)` pairs in id order.
    fn barycenter(&self) -> PyResult<Vec<(i64, i64)>> {
        let b = geometry::barycenter(&self.inner).map_err(err)?;
        Ok(b.iter().map(|r| (*r.numer(), *r.denom())).collect())
    }

    #[pyo3(signature = (base = None))]
    fn h_vector(&self, base: Option<Vec<String>>) -> PyResult<Vec<u64>> {
        let b = match base {
            Some(ids) => self.order(&ids)?,
            None => self.inner.standard_list(),
        };
        flip_order::h_vector(&self.inner, &b).map_err(err)
    }

    fn singleton_count(&self) -> PyResult<u64> {
        geometry::singleton_count_recursive(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Tree(nu={}, json={})", self.inner.nu(), self.inner.to_json())
    }
}

/// Named example trees.
#[pyfunction]
fn example(name: &str) -> PyResult<PyTree> {
    arbora::corpus::named()
        .into_iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, inner)| PyTree { inner })
        .ok_or_else(|| ArboraError::new_err(format!("no example named {}", name)))
}

#[pymodule]
fn pyarbora(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTree>()?;
    m.add_function(wrap_pyfunction!(example, m)?)?;
    m.add("ArboraError", m.py().get_type::<ArboraError>())?;
    Ok(())
}
