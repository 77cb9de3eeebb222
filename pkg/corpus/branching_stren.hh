% Branching program plus an unreachable predicate to strengthen away.
type s o.
type r o.
type p o.
type q o.
type t o.

((s => r) => p) & ((r => p) => p) => q.

%strengthen bctx from t in q.
