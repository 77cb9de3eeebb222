% Removing one occurrence of an element from a list, next to append.
kind nat type.
kind list type.

type nil list.
type cons nat -> list -> list.
type list_minus nat -> list -> list -> o.
type append list -> list -> list -> o.

list_minus X (cons X L) L.
list_minus X L L1 => list_minus X (cons Y L) (cons Y L1).
append nil L L.
append L1 L2 L3 => append (cons X L1) L2 (cons X L3).

%strengthen uctx from append nil L L in list_minus X L1 L2.
