% One clause whose two conjunctive branches load different assumptions.
type s o.
type r o.
type p o.
type q o.

((s => r) => p) & ((r => p) => p) => q.
