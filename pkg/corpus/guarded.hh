% Proving g loads b into the context but never produces goal f or b.
type f o.
type b o.
type a o.
type g o.

f => b.
(b => a) => g.
a.
f.

%strengthen gctx from f in g.
