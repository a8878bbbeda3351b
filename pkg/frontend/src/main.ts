// Browser entry point. When the bundle is served by the campaign service
// itself the API is same-origin; an ?api= query parameter overrides that
// for development against a separately hosted service.

import { ApiClient } from './api.js'
import { App } from './app.js'

const params = new URLSearchParams(window.location.search)
const base = params.get('api') ?? ''
const root = document.getElementById('app')
if (root === null) throw new Error('missing #app mount point')

const app = new App(root, new ApiClient(base))

const campaignId = params.get('campaign')
if (campaignId) app.openCampaign(campaignId)

declare global {
  interface Window {
    expoptApp: App
  }
}
window.expoptApp = app
