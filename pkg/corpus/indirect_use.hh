% f is reachable from g through the intermediate predicate a.
type f o.
type a o.
type g o.

f => a.
a => g.
f.
