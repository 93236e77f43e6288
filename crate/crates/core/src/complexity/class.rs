use crate::error::{Error, Result};

/// Values of `m` functions on `n` points: `values[f][i] = f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteFunctionClass {
    point_ids: Vec<String>,
    function_ids: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl FiniteFunctionClass {
    pub fn new(point_ids: Vec<String>, function_ids: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.is_empty() || point_ids.is_empty() {
            return Err(Error::InvalidInput(
                "a function class needs at least one function and one point".into(),
            ));
        }
        if function_ids.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} function ids for {} rows",
                function_ids.len(),
                values.len()
            )));
        }
        for (id, row) in function_ids.iter().zip(&values) {
            if row.len() != point_ids.len() {
                return Err(Error::InvalidInput(format!(
                    "function {id} has {} values, expected {}",
                    row.len(),
                    point_ids.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("function {id} has non-finite value {v}")));
            }
        }
        Ok(Self {
            point_ids,
            function_ids,
            values,
        })
    }

    /// Class with generated ids `x0, x1, ...` and `f0, f1, ...`.
    pub fn from_rows(values: Vec<Vec<f64>>) -> Result<Self> {
        let n = values.first().map_or(0, Vec::len);
        let points = (0..n).map(|i| format!("x{i}")).collect();
        let functions = (0..values.len()).map(|f| format!("f{f}")).collect();
        Self::new(points, functions, values)
    }

    /// Number of functions.
    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// Number of points.
    pub fn n(&self) -> usize {
        self.point_ids.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn point_ids(&self) -> &[String] {
        &self.point_ids
    }

    pub fn function_ids(&self) -> &[String] {
        &self.function_ids
    }

    /// The class restricted to the given point columns, in the given order.
    pub fn restrict(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidInput("restriction to zero points".into()));
        }
        if let Some(&c) = columns.iter().find(|&&c| c >= self.n()) {
            return Err(Error::range("column", c, format!("[0, {})", self.n())));
        }
        let values = self
            .values
            .iter()
            .map(|row| columns.iter().map(|&c| row[c]).collect())
            .collect();
        let point_ids = columns.iter().map(|&c| self.point_ids[c].clone()).collect();
        Ok(Self {
            point_ids,
            function_ids: self.function_ids.clone(),
            values,
        })
    }
}

/// A class tabulated on a pool of candidate points, optionally declared to
/// lie in a vector space of functions of known dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolClass {
    pub class: FiniteFunctionClass,
    pub vector_space_dim: Option<usize>,
}

impl PoolClass {
    pub fn new(class: FiniteFunctionClass, vector_space_dim: Option<usize>) -> Self {
        Self {
            class,
            vector_space_dim,
        }
    }

    /// Affine functions `x -> a x + b` on the real line for every
    /// `(a, b)` in `slopes x intercepts`, tabulated on `pool`. Declared
    /// dimension 2.
    pub fn affine_on_line(pool: &[f64], slopes: &[f64], intercepts: &[f64]) -> Result<Self> {
        let mut ids = Vec::with_capacity(slopes.len() * intercepts.len());
        let mut rows = Vec::with_capacity(ids.capacity());
        for &a in slopes {
            for &b in intercepts {
                ids.push(format!("{a}*x+{b}"));
                rows.push(pool.iter().map(|&x| a * x + b).collect());
            }
        }
        let points = pool.iter().map(|x| x.to_string()).collect();
        Ok(Self::new(FiniteFunctionClass::new(points, ids, rows)?, Some(2)))
    }

    /// Constant functions `x -> c` on `pool`. Declared dimension 1.
    pub fn constants(pool: &[f64], levels: &[f64]) -> Result<Self> {
        let ids = levels.iter().map(|c| format!("{c}")).collect();
        let rows = levels.iter().map(|&c| vec![c; pool.len()]).collect();
        let points = pool.iter().map(|x| x.to_string()).collect();
        Ok(Self::new(FiniteFunctionClass::new(points, ids, rows)?, Some(1)))
    }

    pub fn pool_size(&self) -> usize {
        self.class.n()
    }
}

/// Limits on subset enumeration. Searches are exhaustive while the number of
/// candidate subsets is at most `max_subsets`; beyond that, `max_subsets`
/// subsets are drawn at random from a stream seeded with `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_subsets: u64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_subsets: 1_000_000,
            seed: 0,
        }
    }
}
