//! Small reference graphs in the text format.

/// Five nodes, nine edges, two of them parallel `c`–`T` edges. Driven at 3 V
/// the `a`–`b` and `c`–`b` edges carry no current.
pub const CASE_STUDY: &str = "\
node S
node a
node b
node c
node T
start S
terminal T
edge S a 2
edge S b 3
edge S c 1
edge a b 1
edge c b 4
edge a T 4
edge b T 6
edge c T 6
edge c T 3
";

/// Balanced bridge (1·4 = 2·2): the `p`–`q` edge is equipotential.
pub const WHEATSTONE: &str = "\
start S
terminal T
edge S p 1
edge S q 2
edge p T 2
edge q T 4
edge p q 7
";
