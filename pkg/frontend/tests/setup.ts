// jsdom has no canvas implementation; panes already tolerate a null 2D
// context, this stub just keeps jsdom from logging "not implemented" noise
// that would trip the no-console-errors workflow check.
HTMLCanvasElement.prototype.getContext = (() => null) as never;
