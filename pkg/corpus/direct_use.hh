% The goal can backchain straight onto f => g, so f may be needed.
type f o.
type g o.

f => g.
f.
