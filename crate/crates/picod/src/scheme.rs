//! Linear broadcast schemes and the decodability verifier.
//!
//! A scheme is an `l x m` matrix over a prime field: row `t` is the
//! coefficient vector of the `t`-th broadcast symbol. Client `i` knows every
//! message outside its request set `R_i`, so it can cancel all columns
//! outside `R_i` from every broadcast. What remains is the scheme matrix
//! restricted to the columns `R_i`; the client is satisfied exactly when some
//! unit vector (a single requested message) lies in the row space of that
//! restriction. The verifier applies this criterion literally and reports,
//! per satisfied client, the lowest-index decodable message together with the
//! combination of rows that decodes it.

use crate::gf::{BitSpace, FieldError, FieldOrder, ModSpace, RowMatrix};
use crate::instance::PicodInstance;
use thiserror::Error;

/// Errors from scheme construction, verification, and combination.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("scheme has {scheme} columns but the instance has {instance} messages")]
    DimensionMismatch { scheme: usize, instance: usize },
    #[error("support mentions message {index}, outside 1..={message_count}")]
    MessageOutOfRange { index: usize, message_count: usize },
    #[error("the given vertex set is not independent")]
    NotIndependent,
    #[error("component instances share vertex {vertex}")]
    OverlappingComponents { vertex: usize },
    #[error("scheme for a component has a nonzero coefficient on vertex {vertex}, outside the component")]
    SupportOutsideComponent { vertex: usize },
    #[error("component schemes use different fields")]
    FieldMismatch,
    #[error("no component parts given")]
    NoParts,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An `l x m` linear scheme over a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    matrix: RowMatrix,
}

impl Scheme {
    pub fn new(matrix: RowMatrix) -> Self {
        Self { matrix }
    }

    /// A scheme whose rows are sums of the listed messages (coefficient 1 on
    /// each support member). Message indices are 1-based.
    pub fn from_supports<S: AsRef<[usize]>>(
        field: FieldOrder,
        message_count: usize,
        supports: &[S],
    ) -> Result<Self, SchemeError> {
        let mut matrix = RowMatrix::zero(field, supports.len(), message_count);
        for (r, support) in supports.iter().enumerate() {
            for &v in support.as_ref() {
                if v < 1 || v > message_count {
                    return Err(SchemeError::MessageOutOfRange {
                        index: v,
                        message_count,
                    });
                }
                matrix.set(r, v - 1, 1);
            }
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &RowMatrix {
        &self.matrix
    }

    /// Number of broadcast rows `l`.
    pub fn length(&self) -> usize {
        self.matrix.rows()
    }

    pub fn field(&self) -> FieldOrder {
        self.matrix.field()
    }

    pub fn message_count(&self) -> usize {
        self.matrix.cols()
    }

    /// 1-based messages with a nonzero coefficient in row `r`.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        self.matrix
            .row(r)
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(c, _)| c + 1)
            .collect()
    }

    /// Supports of all rows.
    pub fn supports(&self) -> Vec<Vec<usize>> {
        (0..self.length()).map(|r| self.row_support(r)).collect()
    }
}

/// Outcome for a single client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClientStatus {
    /// The client decodes `message` (its lowest-index decodable request) via
    /// the row combination `coefficients` (one coefficient per scheme row).
    Satisfied {
        message: usize,
        coefficients: Vec<u16>,
    },
    Unsatisfied,
}

impl ClientStatus {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, ClientStatus::Satisfied { .. })
    }
}

/// Verification outcome for every client, in canonical client order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatisfactionReport {
    pub statuses: Vec<ClientStatus>,
    pub all_satisfied: bool,
}

impl SatisfactionReport {
    /// 0-based canonical indices of satisfied clients.
    pub fn satisfied_clients(&self) -> Vec<usize> {
        self.statuses
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_satisfied())
            .map(|(i, _)| i)
            .collect()
    }

    /// 0-based canonical indices of unsatisfied clients.
    pub fn unsatisfied_clients(&self) -> Vec<usize> {
        self.statuses
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_satisfied())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Projection of the scheme matrix onto the columns of one request set.
fn project(matrix: &RowMatrix, request: &[usize]) -> Vec<Vec<u16>> {
    (0..matrix.rows())
        .map(|r| request.iter().map(|&v| matrix.get(r, v - 1)).collect())
        .collect()
}

/// Full verification: per-client decodability with witnesses.
pub fn verify(inst: &PicodInstance, scheme: &Scheme) -> Result<SatisfactionReport, SchemeError> {
    let matrix = scheme.matrix();
    if matrix.cols() != inst.message_count() {
        return Err(SchemeError::DimensionMismatch {
            scheme: matrix.cols(),
            instance: inst.message_count(),
        });
    }
    let binary = matrix.field() == FieldOrder::BINARY;
    let mut statuses = Vec::with_capacity(inst.client_count());
    for request in inst.clients() {
        let projected = project(matrix, request);
        let width = request.len();
        let status = if binary {
            let mut space = BitSpace::new(width, matrix.rows());
            for row in &projected {
                space.insert_u16(row);
            }
            decode_lowest(request, |unit| space.express_u16(unit))
        } else {
            let mut space = ModSpace::new(matrix.field(), width, matrix.rows());
            for row in &projected {
                space.insert(row);
            }
            decode_lowest(request, |unit| space.express(unit))
        };
        statuses.push(status);
    }
    let all_satisfied = statuses.iter().all(ClientStatus::is_satisfied);
    Ok(SatisfactionReport {
        statuses,
        all_satisfied,
    })
}

fn decode_lowest(
    request: &[usize],
    mut express: impl FnMut(&[u16]) -> Option<Vec<u16>>,
) -> ClientStatus {
    let width = request.len();
    let mut unit = vec![0u16; width];
    for (t, &message) in request.iter().enumerate() {
        unit[t] = 1;
        if let Some(coefficients) = express(&unit) {
            return ClientStatus::Satisfied {
                message,
                coefficients,
            };
        }
        unit[t] = 0;
    }
    ClientStatus::Unsatisfied
}

/// Witness-free check that every client is satisfied; bails out at the first
/// unsatisfied client. Used by exhaustive searches.
pub fn satisfies_all(inst: &PicodInstance, matrix: &RowMatrix) -> bool {
    debug_assert_eq!(matrix.cols(), inst.message_count());
    let binary = matrix.field() == FieldOrder::BINARY;
    for request in inst.clients() {
        let projected = project(matrix, request);
        let width = request.len();
        let mut unit = vec![0u16; width];
        let client_ok = if binary {
            let mut space = BitSpace::new(width, matrix.rows());
            for row in &projected {
                space.insert_u16(row);
            }
            (0..width).any(|t| {
                unit.fill(0);
                unit[t] = 1;
                let packed = space.pack(&unit);
                space.contains(&packed)
            })
        } else {
            let mut space = ModSpace::new(matrix.field(), width, matrix.rows());
            for row in &projected {
                space.insert(row);
            }
            (0..width).any(|t| {
                unit.fill(0);
                unit[t] = 1;
                space.express(&unit).is_some()
            })
        };
        if !client_ok {
            return false;
        }
    }
    true
}

/// Clients satisfied by each row alone: client `i` appears under row `t` when
/// row `t` restricted to `R_i` has exactly one nonzero coefficient.
pub fn row_satisfied_clients(inst: &PicodInstance, scheme: &Scheme) -> Vec<Vec<usize>> {
    let matrix = scheme.matrix();
    (0..matrix.rows())
        .map(|r| {
            inst.clients()
                .iter()
                .enumerate()
                .filter(|(_, request)| {
                    request
                        .iter()
                        .filter(|&&v| matrix.get(r, v - 1) != 0)
                        .count()
                        == 1
                })
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

/// Result of broadcasting the sum of an independent vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmitOutcome {
    /// The broadcast support (the independent set itself, sorted).
    pub support: Vec<usize>,
    /// 0-based canonical indices of clients satisfied by this single row:
    /// exactly those whose request set meets the support (necessarily once).
    pub satisfied: Vec<usize>,
}

/// Broadcasting the plain sum over an independent set `iset` satisfies every
/// client whose request set intersects `iset`: independence makes the
/// intersection a single message, and everything else in the row is side
/// information for that client.
pub fn transmit_independent(
    inst: &PicodInstance,
    iset: &[usize],
) -> Result<TransmitOutcome, SchemeError> {
    for &v in iset {
        if v < 1 || v > inst.message_count() {
            return Err(SchemeError::MessageOutOfRange {
                index: v,
                message_count: inst.message_count(),
            });
        }
    }
    if !inst.is_independent(iset) {
        return Err(SchemeError::NotIndependent);
    }
    let mut support: Vec<usize> = iset.to_vec();
    support.sort_unstable();
    support.dedup();
    let mut marked = vec![false; inst.message_count() + 1];
    for &v in &support {
        marked[v] = true;
    }
    let satisfied = inst
        .clients()
        .iter()
        .enumerate()
        .filter(|(_, request)| request.iter().any(|&v| marked[v]))
        .map(|(i, _)| i)
        .collect();
    Ok(TransmitOutcome { support, satisfied })
}

/// Combines per-component schemes into one scheme for the parent instance.
///
/// Preconditions checked: at least one part, a shared field, a shared message
/// count, pairwise-disjoint component vertex sets, and every scheme supported
/// inside its own component. Rows are zero-padded to the maximum length and
/// summed; each client then sees exactly its own component's rows after
/// projection, so the result verifies whenever each part verifies.
pub fn combine_component_schemes(
    parts: &[(PicodInstance, Scheme)],
) -> Result<Scheme, SchemeError> {
    let (first_inst, first_scheme) = parts.first().ok_or(SchemeError::NoParts)?;
    let field = first_scheme.field();
    let message_count = first_inst.message_count();
    let mut claimed = vec![false; message_count + 1];
    for (inst, scheme) in parts {
        if scheme.field() != field {
            return Err(SchemeError::FieldMismatch);
        }
        if inst.message_count() != message_count || scheme.message_count() != message_count {
            return Err(SchemeError::DimensionMismatch {
                scheme: scheme.message_count(),
                instance: message_count,
            });
        }
        let mut in_component = vec![false; message_count + 1];
        for request in inst.clients() {
            for &v in request {
                if claimed[v] {
                    return Err(SchemeError::OverlappingComponents { vertex: v });
                }
                in_component[v] = true;
            }
        }
        for v in 1..=message_count {
            if in_component[v] {
                claimed[v] = true;
            }
        }
        for r in 0..scheme.length() {
            for c in 0..message_count {
                if scheme.matrix().get(r, c) != 0 && !in_component[c + 1] {
                    return Err(SchemeError::SupportOutsideComponent { vertex: c + 1 });
                }
            }
        }
    }
    let length = parts.iter().map(|(_, s)| s.length()).max().unwrap_or(0);
    let mut combined = RowMatrix::zero(field, length, message_count);
    for (_, scheme) in parts {
        for r in 0..scheme.length() {
            for c in 0..message_count {
                let x = scheme.matrix().get(r, c);
                if x != 0 {
                    combined.set(r, c, field.add(combined.get(r, c), x));
                }
            }
        }
    }
    Ok(Scheme::new(combined))
}

/// Whether the supports form a conflict-free cover: every client's request
/// set intersects at least one support in exactly one message.
pub fn is_conflict_free_cover<S: AsRef<[usize]>>(inst: &PicodInstance, supports: &[S]) -> bool {
    inst.clients().iter().all(|request| {
        supports.iter().any(|support| {
            let support = support.as_ref();
            request
                .iter()
                .filter(|v| support.contains(v))
                .count()
                == 1
        })
    })
}
