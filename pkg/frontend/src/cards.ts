/** Card token helpers.
 *
 * The service speaks the textual notation of the match logs: one
 * character per card, ranks low to high "3456789TJQKA2", black joker
 * "B", red joker "R", pass "P".  Hands and moves are multisets, so all
 * comparisons go through a canonical sorted form.
 */

export const RANKS = "3456789TJQKA2BR";

export type Card = string;

export function rankIndex(card: Card): number {
  const i = RANKS.indexOf(card);
  if (i < 0) throw new Error(`unknown card ${card}`);
  return i;
}

/** Split a hand or move string into card tokens, sorted low to high. */
export function cardsOf(text: string): Card[] {
  if (text === "" || text === "P") return [];
  const cards = text.split("");
  cards.forEach(rankIndex); // validate
  return sortCards(cards);
}

export function sortCards(cards: Card[]): Card[] {
  return [...cards].sort((a, b) => rankIndex(a) - rankIndex(b));
}

/** Canonical move token for a selection; empty selection is Pass. */
export function tokenOf(cards: Card[]): string {
  return cards.length === 0 ? "P" : sortCards(cards).join("");
}

export function canonical(token: string): string {
  return tokenOf(cardsOf(token));
}

/** True when two tokens denote the same card multiset. */
export function sameCards(a: string, b: string): boolean {
  return canonical(a) === canonical(b);
}

/** Multiset containment: can `sel` be raised out of `hand`? */
export function isSubset(sel: Card[], hand: Card[]): boolean {
  const pool = new Map<Card, number>();
  for (const c of hand) pool.set(c, (pool.get(c) ?? 0) + 1);
  for (const c of sel) {
    const n = pool.get(c) ?? 0;
    if (n === 0) return false;
    pool.set(c, n - 1);
  }
  return true;
}

/** Remove one copy of each selected card; throws if not contained. */
export function removeCards(hand: Card[], sel: Card[]): Card[] {
  const out = [...hand];
  for (const c of sel) {
    const i = out.indexOf(c);
    if (i < 0) throw new Error(`card ${c} not in hand`);
    out.splice(i, 1);
  }
  return out;
}
