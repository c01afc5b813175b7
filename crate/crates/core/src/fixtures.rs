//! Small hand-built instances shared by tests, docs and the CLI smoke tests.

use crate::model::{Bid, Instance};

/// Two goods with capacities (2, 1) and four bids:
/// ⟨1,1,5⟩ ⟨2,0,6⟩ ⟨1,0,2⟩ ⟨0,1,3⟩. The optimum is bids {1, 3} worth 9.
pub fn e1() -> Instance {
    Instance::new(
        vec![2, 1],
        vec![
            Bid::new(vec![1, 1], 5),
            Bid::new(vec![2, 0], 6),
            Bid::new(vec![1, 0], 2),
            Bid::new(vec![0, 1], 3),
        ],
        [],
        0,
    )
    .expect("fixture is valid")
}

pub const E1_TEXT: &str = "MUCA 1
GOODS 2
CAPS 2 1
BIDS 4
BID 1 1 5
BID 2 0 6
BID 1 0 2
BID 0 1 3
";
