% Typing clauses next to unrelated append clauses.
kind ty type.
kind tm type.
kind list type.

type b ty.
type arr ty -> ty -> ty.
type app tm -> tm -> tm.
type abs ty -> (tm -> tm) -> tm.
type typeof tm -> ty -> o.

type nil list.
type cons tm -> list -> list.
type append list -> list -> list -> o.

typeof M1 (arr T1 T2) => typeof M2 T1 => typeof (app M1 M2) T2.
(pi x \ typeof x T1 => typeof (M x) T2) => typeof (abs T1 M) (arr T1 T2).
append nil L L.
append L1 L2 L3 => append (cons X L1) L2 (cons X L3).

%strengthen tyctx from append nil L L in typeof M T.
