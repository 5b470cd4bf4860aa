/**
 * DOM layer: renders the scenario screen and the live radar panel from the
 * controller's view. No trait math happens here; the view is drawn verbatim.
 */

import { AssessmentApi } from "./api.js";
import { SessionController } from "./controller.js";
import { renderConfidenceBars, renderRadarSvg } from "./radar.js";
import type { UISessionView } from "./state.js";

export function mountApp(root: HTMLElement, api = new AssessmentApi()): SessionController {
  const controller = new SessionController(api);
  root.innerHTML = `
    <header><h1>Adventure Assessment</h1><div id="progress"></div></header>
    <main>
      <section id="scenario-screen" hidden>
        <p id="prompt"></p>
        <form id="options"></form>
        <label id="follow-up" hidden>
          <span id="follow-up-text">Tell us a bit more:</span>
          <textarea id="free-text" rows="3"></textarea>
        </label>
        <button id="submit" disabled>Submit</button>
        <p id="error" class="error" role="alert" hidden></p>
      </section>
      <section id="results-screen" hidden>
        <h2>Your profile</h2>
        <div id="radar"></div>
        <div id="confidence"></div>
      </section>
    </main>`;

  const el = <T extends HTMLElement>(id: string) => root.querySelector<T>(`#${id}`)!;
  const scenarioScreen = el<HTMLElement>("scenario-screen");
  const resultsScreen = el<HTMLElement>("results-screen");
  const optionsForm = el<HTMLFormElement>("options");
  const submitButton = el<HTMLButtonElement>("submit");
  const followUp = el<HTMLLabelElement>("follow-up");
  const freeText = el<HTMLTextAreaElement>("free-text");
  const errorLine = el<HTMLParagraphElement>("error");

  function selectedOption(): number | null {
    const checked = optionsForm.querySelector<HTMLInputElement>("input:checked");
    return checked ? Number(checked.value) : null;
  }

  function renderScenario(view: UISessionView): void {
    const scenario = view.scenario!;
    scenarioScreen.hidden = false;
    resultsScreen.hidden = true;
    el<HTMLElement>("progress").textContent =
      `scenario ${view.progress.seen + 1} of at most ${view.progress.max}`;
    el<HTMLElement>("prompt").textContent = scenario.prompt;
    optionsForm.innerHTML = scenario.options
      .map(
        (option, index) =>
          `<label class="option"><input type="radio" name="option" value="${index}">` +
          `<span>${option}</span></label>`,
      )
      .join("");
    followUp.hidden = true;
    freeText.value = "";
    submitButton.disabled = true;
    errorLine.hidden = true;
  }

  // The free-text box appears once a choice is made, when the scenario
  // carries a follow-up question. One listener for the whole session.
  optionsForm.addEventListener("change", () => {
    const scenario = controller.view?.scenario;
    const option = selectedOption();
    submitButton.disabled = option === null;
    const showFollowUp = Boolean(scenario?.has_follow_up) && option !== null;
    followUp.hidden = !showFollowUp;
    if (showFollowUp && scenario?.follow_up_template && option !== null) {
      el<HTMLElement>("follow-up-text").textContent = scenario.follow_up_template.replace(
        "{option}",
        scenario.options[option].toLowerCase(),
      );
    }
  });

  function renderResults(view: UISessionView): void {
    scenarioScreen.hidden = true;
    resultsScreen.hidden = false;
    el<HTMLElement>("progress").textContent = "complete";
    if (view.profile) {
      el<HTMLElement>("radar").innerHTML = renderRadarSvg(view.profile);
      el<HTMLElement>("confidence").innerHTML = renderConfidenceBars(view.profile);
    }
  }

  controller.onChange((view) => {
    if (view.done) renderResults(view);
    else renderScenario(view);
  });

  submitButton.addEventListener("click", async (event) => {
    event.preventDefault();
    const option = selectedOption();
    if (option === null) return;
    const text = freeText.value.trim() || null;
    const result = await controller.submit(option, text);
    if (!result && controller.lastError) {
      errorLine.textContent = controller.lastError;
      errorLine.hidden = false;
    }
  });

  void controller.start();
  return controller;
}
