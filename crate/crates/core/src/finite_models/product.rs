use super::structure::{table_len, FiniteStructure, StructureError};

/// Direct product of finite structures with componentwise operations.
///
/// Elements are encoded in mixed radix with the first factor most
/// significant; [`ProductStructure::decode`] recovers the projections.
#[derive(Debug, Clone)]
pub struct ProductStructure {
    factors: Vec<FiniteStructure>,
    structure: FiniteStructure,
}

impl ProductStructure {
    pub fn factors(&self) -> &[FiniteStructure] {
        &self.factors
    }

    pub fn structure(&self) -> &FiniteStructure {
        &self.structure
    }

    pub fn into_structure(self) -> FiniteStructure {
        self.structure
    }

    pub fn encode(&self, components: &[usize]) -> usize {
        encode(&self.factors, components)
    }

    pub fn decode(&self, element: usize) -> Vec<usize> {
        decode(&self.factors, element)
    }

    /// Projection of `element` onto factor `i`.
    pub fn project(&self, element: usize, i: usize) -> usize {
        self.decode(element)[i]
    }
}

fn encode(factors: &[FiniteStructure], components: &[usize]) -> usize {
    factors.iter().zip(components).fold(0, |acc, (f, &c)| acc * f.size() + c)
}

fn decode(factors: &[FiniteStructure], mut element: usize) -> Vec<usize> {
    let mut out = vec![0; factors.len()];
    for (slot, f) in out.iter_mut().zip(factors).rev() {
        *slot = element % f.size();
        element /= f.size();
    }
    out
}

/// Componentwise product. All factors must share one signature.
pub fn product(factors: &[FiniteStructure]) -> Result<ProductStructure, StructureError> {
    let first = factors.first().ok_or(StructureError::EmptyUniverse)?;
    let sig = first.signature().clone();
    if factors.iter().any(|f| f.signature() != &sig) {
        return Err(StructureError::SignatureMismatch);
    }
    let size: usize = factors.iter().map(FiniteStructure::size).product();
    let row = |offset: usize, arity: usize| -> Vec<usize> {
        // decode a row-major table offset into product elements
        let mut args = vec![0; arity];
        let mut rest = offset;
        for a in args.iter_mut().rev() {
            *a = rest % size;
            rest /= size;
        }
        args
    };
    let mut functions = Vec::new();
    for (fi, (_, arity)) in sig.functions().iter().enumerate() {
        let table = (0..table_len(size, *arity))
            .map(|offset| {
                let args: Vec<Vec<usize>> = row(offset, *arity).into_iter().map(|e| decode(factors, e)).collect();
                let comps: Vec<usize> = factors
                    .iter()
                    .enumerate()
                    .map(|(k, f)| f.apply(fi, &args.iter().map(|a| a[k]).collect::<Vec<_>>()))
                    .collect();
                encode(factors, &comps)
            })
            .collect();
        functions.push(table);
    }
    let mut relations = Vec::new();
    for (ri, (_, arity)) in sig.relations().iter().enumerate() {
        let table = (0..table_len(size, *arity))
            .map(|offset| {
                let args: Vec<Vec<usize>> = row(offset, *arity).into_iter().map(|e| decode(factors, e)).collect();
                factors.iter().enumerate().all(|(k, f)| f.holds(ri, &args.iter().map(|a| a[k]).collect::<Vec<_>>()))
            })
            .collect();
        relations.push(table);
    }
    let structure = FiniteStructure::from_tables(sig, size, functions, relations)?;
    Ok(ProductStructure { factors: factors.to_vec(), structure })
}
