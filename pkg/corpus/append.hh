% Appending two lists of naturals to form a third.
kind nat type.
kind list type.

type 1 nat.
type 2 nat.
type nil list.
type cons nat -> list -> list.
type append list -> list -> list -> o.

append nil L L.
append L1 L2 L3 => append (cons X L1) L2 (cons X L3).
